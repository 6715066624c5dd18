import itertools

import numpy as np
import pytest
import torch

from components.autodiff import backward, pca_eig, record
from components.autodiff.tape import central_difference
from entities.entity_exception import DataFormatError, InvalidArgumentError
from models.vpn import (
    AffineInvariantModel, CouplingLayer, RotationLayer, VpnModel, backward_loss, deserialize,
    forward_loss, project_invariants, serialize, training_loss,
)
from models.vpn.serialization import _parameter_count
from tests.conftest import randomize_rotations

DIMS = [2, 3, 5, 8]


def make_model(dim: int, seed: int, hidden=None) -> VpnModel:
    model = VpnModel(dim, n_blocks=4, hidden_width=hidden, generator=torch.Generator().manual_seed(seed))
    return randomize_rotations(model, seed)


def min_preactivation(model: VpnModel, batch: torch.Tensor, k: int) -> float:
    """Smallest |input| to any ReLU while evaluating both losses."""
    seen = []
    hooks = [
        layer.register_forward_hook(lambda _m, _i, out: seen.append(out.detach().abs().min().item()))
        for coupling in model.layers if isinstance(coupling, CouplingLayer)
        for layer in list(coupling.mlp)[:-1] if isinstance(layer, torch.nn.Linear)
    ]
    with torch.no_grad():
        training_loss(model, batch, k)
    for hook in hooks:
        hook.remove()
    return min(seen) if seen else np.inf


class TestRotationLayer:
    def test_matrix_is_orthogonal(self):
        layer = randomize_rotations(RotationLayer(5), 3)
        R = layer.matrix().detach().numpy()
        np.testing.assert_allclose(R @ R.T, np.eye(5), atol=1e-12)

    def test_round_trip(self, rng):
        layer = randomize_rotations(RotationLayer(4), 1)
        x = torch.tensor(rng.normal(size=(10, 4)))
        with torch.no_grad():
            np.testing.assert_allclose(layer.inverse(layer(x)).numpy(), x.numpy(), atol=1e-12)

    def test_zero_parameters_are_identity(self, rng):
        x = torch.tensor(rng.normal(size=(3, 3)))
        with torch.no_grad():
            np.testing.assert_allclose(RotationLayer(3)(x).numpy(), x.numpy(), atol=0)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            RotationLayer(3)(torch.zeros(2, 4, dtype=torch.float64))


class TestCouplingLayer:
    @pytest.mark.parametrize("dim", [2, 3, 7])
    def test_split_keeps_x_b_and_inverts(self, dim, rng):
        layer = CouplingLayer(dim, generator=torch.Generator().manual_seed(0))
        x = torch.tensor(rng.normal(size=(6, dim)))
        with torch.no_grad():
            y = layer(x)
            np.testing.assert_array_equal(y[:, layer.split_a:].numpy(), x[:, layer.split_a:].numpy())
            np.testing.assert_allclose(layer.inverse(y).numpy(), x.numpy(), atol=1e-12)
        assert layer.split_a == (dim + 1) // 2

    def test_default_hidden_width_is_x_b_width(self):
        layer = CouplingLayer(5)
        assert layer.mlp[0].out_features == 2
        assert CouplingLayer(5, hidden_width=9).mlp[0].out_features == 9

    def test_needs_two_dimensions(self):
        with pytest.raises(InvalidArgumentError):
            CouplingLayer(1)


class TestVpnVolumeAndInvertibility:
    @pytest.mark.parametrize("dim,seed", list(itertools.product(DIMS, range(3))))
    def test_unit_jacobian_determinant(self, dim, seed, rng):
        model = make_model(dim, seed)
        points = rng.normal(size=(100, dim))
        for point in points:
            jac = torch.autograd.functional.jacobian(lambda x: model(x), torch.tensor(point))
            assert abs(abs(np.linalg.det(jac.numpy())) - 1.0) < 1e-4

    @pytest.mark.parametrize("dim,seed", list(itertools.product(DIMS, range(3))))
    def test_round_trip(self, dim, seed, rng):
        model = make_model(dim, seed)
        x = torch.tensor(rng.normal(size=(100, dim)))
        with torch.no_grad():
            error = (model.inverse(model(x)) - x).abs().max().item()
        assert error <= 1e-8

    def test_layer_layout(self):
        model = VpnModel(3, n_blocks=2)
        kinds = [type(layer).__name__ for layer in model.layers]
        assert kinds == ["RotationLayer", "CouplingLayer", "RotationLayer", "CouplingLayer", "RotationLayer"]
        assert len(model.trace(torch.zeros(1, 3, dtype=torch.float64))) == 6

    def test_single_vector_input(self, rng):
        model = make_model(3, 0)
        x = rng.normal(size=3)
        with torch.no_grad():
            z = model(torch.tensor(x))
            batch = model(torch.tensor(x[None, :]))
        np.testing.assert_allclose(z.numpy(), batch[0].numpy(), atol=1e-14)

    def test_seeded_initialisation(self):
        a = VpnModel(4, generator=torch.Generator().manual_seed(5))
        b = VpnModel(4, generator=torch.Generator().manual_seed(5))
        for pa, pb in zip(a.parameters(), b.parameters()):
            assert torch.equal(pa, pb)


class TestLosses:
    def test_project_invariants_zeroes_first_k(self):
        z = torch.arange(1.0, 7.0, dtype=torch.float64).reshape(2, 3)
        np.testing.assert_array_equal(project_invariants(z, 2).numpy(), [[0, 0, 3], [0, 0, 6]])

    def test_forward_loss_definition(self, rng):
        model = make_model(3, 1)
        batch = torch.tensor(rng.normal(size=(8, 3)))
        with torch.no_grad():
            z = model(batch)
            expected = (z[:, :2] ** 2).sum(dim=1).mean()
            assert forward_loss(model, batch, 2).item() == pytest.approx(expected.item(), rel=1e-14)

    def test_backward_loss_definition(self, rng):
        model = make_model(3, 1)
        batch = torch.tensor(rng.normal(size=(8, 3)))
        with torch.no_grad():
            recon = model.inverse(project_invariants(model(batch), 1))
            expected = ((recon - batch) ** 2).sum(dim=1).mean()
            assert backward_loss(model, batch, 1).item() == pytest.approx(expected.item(), rel=1e-14)

    def test_losses_vanish_on_exact_invariants(self):
        model = VpnModel(2, n_blocks=0)
        batch = torch.tensor([[0.0, 1.0], [0.0, -2.0]], dtype=torch.float64)
        with torch.no_grad():
            assert forward_loss(model, batch, 1).item() == 0.0
            assert backward_loss(model, batch, 1).item() == 0.0

    @pytest.mark.parametrize("k", [0, 3])
    def test_k_range(self, k):
        with pytest.raises(InvalidArgumentError):
            forward_loss(VpnModel(3), torch.zeros(2, 3, dtype=torch.float64), k)

    def test_no_backward_term(self, rng):
        model = make_model(3, 2)
        batch = torch.tensor(rng.normal(size=(4, 3)))
        total, fwd, bwd = training_loss(model, batch, 1, use_backward=False)
        assert total.item() == fwd.item()
        assert bwd.item() == 0.0


class TestLossGradients:
    @pytest.mark.parametrize("dim,seed", list(itertools.product(DIMS, range(25))))
    def test_autograd_matches_finite_differences(self, dim, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, dim))
        model = make_model(dim, seed)
        for _ in range(20):
            batch = torch.tensor(rng.normal(size=(16, dim)))
            if min_preactivation(model, batch, k) > 1e-4:
                break
        else:
            pytest.fail(f"no batch clear of the ReLU kinks for dim={dim} seed={seed}")
        params = list(model.parameters())

        def loss():
            return training_loss(model, batch, k)[0]

        with record():
            grads = backward(loss(), params)
        analytic = torch.cat([g.reshape(-1) for g in grads])
        numeric = torch.cat([central_difference(loss, p, eps=1e-6).reshape(-1) for p in params])
        relative = (analytic - numeric).norm() / max(analytic.norm().item(), 1e-8)
        assert relative.item() < 1e-4


class TestSerialization:
    def test_round_trip_is_bit_exact(self, rng):
        model = make_model(5, 3)
        data = serialize(model, 2)
        restored, k = deserialize(data)
        assert k == 2
        assert serialize(restored, k) == data
        x = torch.tensor(rng.normal(size=(7, 5)))
        with torch.no_grad():
            np.testing.assert_array_equal(restored(x).numpy(), model(x).numpy())

    @pytest.mark.parametrize("hidden", [None, 1, 7, 32])
    def test_hidden_width_recovered(self, hidden):
        model = VpnModel(6, n_blocks=3, hidden_width=hidden)
        restored, _ = deserialize(serialize(model, 1))
        assert restored.layers[1].mlp[0].out_features == model.layers[1].mlp[0].out_features
        n_params = sum(p.numel() for p in model.parameters())
        assert n_params == _parameter_count(6, 3, model.layers[1].mlp[0].out_features)

    def test_header_layout(self):
        data = serialize(VpnModel(3, n_blocks=2), 1)
        assert data[:7] == b"NLINV1\0"
        assert np.frombuffer(data[7:19], dtype="<u4").tolist() == [3, 2, 1]

    def test_bad_magic_names_expected_magic(self):
        data = bytearray(serialize(VpnModel(2, n_blocks=1), 1))
        data[0:1] = b"X"
        with pytest.raises(DataFormatError, match="NLINV1"):
            deserialize(bytes(data))

    def test_truncation_detected(self):
        data = serialize(VpnModel(3, n_blocks=1), 1)
        with pytest.raises(DataFormatError):
            deserialize(data[:-9])
        with pytest.raises(DataFormatError):
            deserialize(data[:10])

    def test_corruption_detected(self):
        data = bytearray(serialize(VpnModel(3, n_blocks=1), 1))
        data[30] ^= 0xFF
        with pytest.raises(DataFormatError, match="checksum"):
            deserialize(bytes(data))


class TestAffineInvariantModel:
    def test_orthogonal_round_trip(self, rng):
        X = rng.normal(size=(40, 3))
        Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        model = AffineInvariantModel(X.mean(axis=0), Q)
        with torch.no_grad():
            z = model(torch.tensor(X))
            np.testing.assert_allclose(model.inverse(z).numpy(), X, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(z.numpy(), axis=1),
                                   np.linalg.norm(X - X.mean(axis=0), axis=1), rtol=1e-12)

    def test_from_pca_orders_ascending_variance(self, rng):
        X = rng.normal(size=(500, 3)) * [3.0, 1.0, 0.1]
        mean, _, vecs = pca_eig(X)
        model = AffineInvariantModel.from_pca(mean, vecs)
        with torch.no_grad():
            variances = model(torch.tensor(X)).numpy().var(axis=0)
        assert np.all(np.diff(variances) > 0)
