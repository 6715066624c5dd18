import numpy as np
import pytest
import scipy.linalg
import torch

from components.autodiff import adam_step, backward, expm, expm_vjp, make_adam, pca_eig, record, skew_from_vector
from components.autodiff.matrix_exp import skew_indices, skew_size
from components.autodiff.tape import central_difference
from entities.entity_exception import InsufficientDataError, InvalidArgumentError, NumericError


class TestSkewFromVector:
    def test_two_by_two_layout(self):
        theta = 0.3
        S = skew_from_vector(torch.tensor([theta], dtype=torch.float64), 2)
        np.testing.assert_array_equal(S.numpy(), [[0.0, -theta], [theta, 0.0]])

    def test_rotation_is_counter_clockwise(self):
        theta = np.pi / 2
        R = expm(skew_from_vector(torch.tensor([theta], dtype=torch.float64), 2))
        np.testing.assert_allclose(R.numpy() @ [1.0, 0.0], [0.0, 1.0], atol=1e-12)

    def test_pairs_are_row_major_upper_triangle(self):
        v = torch.arange(1.0, 7.0, dtype=torch.float64)
        S = skew_from_vector(v, 4).numpy()
        pairs = skew_indices(4).tolist()
        assert pairs == [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]
        for k, (i, j) in enumerate(pairs):
            assert S[j, i] == v[k].item()
            assert S[i, j] == -v[k].item()
        np.testing.assert_array_equal(S, -S.T)

    def test_wrong_length_rejected(self):
        with pytest.raises(InvalidArgumentError):
            skew_from_vector(torch.zeros(4, dtype=torch.float64), 3)


class TestExpm:
    def test_zero_gives_identity(self):
        np.testing.assert_array_equal(expm(torch.zeros(3, 3, dtype=torch.float64)).numpy(), np.eye(3))

    def test_diagonal(self):
        d = np.array([0.5, -1.0, 2.0])
        np.testing.assert_allclose(expm(torch.diag(torch.tensor(d))).numpy(), np.diag(np.exp(d)), rtol=1e-13)

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_skew_input_gives_rotation(self, n, rng):
        v = torch.tensor(rng.normal(size=skew_size(n)))
        R = expm(skew_from_vector(v, n)).numpy()
        np.testing.assert_allclose(R.T @ R, np.eye(n), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)

    def test_matches_scipy(self, rng):
        S = rng.normal(size=(6, 6))
        np.testing.assert_allclose(expm(torch.tensor(S)).numpy(), scipy.linalg.expm(S), rtol=1e-14)

    def test_non_finite_input_rejected(self):
        S = torch.zeros(2, 2, dtype=torch.float64)
        S[0, 1] = float("nan")
        with pytest.raises(NumericError):
            expm(S)

    def test_non_square_rejected(self):
        with pytest.raises(InvalidArgumentError):
            expm(torch.zeros(2, 3, dtype=torch.float64))


class TestExpmGradient:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_vjp_matches_frechet_derivative(self, n, rng):
        S, G, E = (rng.normal(size=(n, n)) for _ in range(3))
        _, frechet = scipy.linalg.expm_frechet(S, E)
        vjp = expm_vjp(torch.tensor(S), torch.tensor(G)).numpy()
        assert np.sum(vjp * E) == pytest.approx(np.sum(G * frechet), rel=1e-10)

    def test_gradcheck(self, rng):
        S = torch.tensor(rng.normal(size=(4, 4)) * 0.5, requires_grad=True)
        assert torch.autograd.gradcheck(expm, (S,), eps=1e-6, atol=1e-8)

    def test_gradient_through_skew_parameters(self, rng):
        v = torch.tensor(rng.normal(size=skew_size(3)), requires_grad=True)
        target = torch.tensor(rng.normal(size=(3, 3)))

        def loss():
            return (expm(skew_from_vector(v, 3)) * target).sum()

        with record():
            (grad,) = backward(loss(), [v])
        np.testing.assert_allclose(grad.numpy(), central_difference(loss, v).numpy(), rtol=1e-7, atol=1e-9)


class TestBackward:
    def test_unreachable_leaf_gets_zeros(self):
        a = torch.ones(3, dtype=torch.float64, requires_grad=True)
        b = torch.ones(2, dtype=torch.float64, requires_grad=True)
        with record():
            grads = backward((a ** 2).sum(), [a, b])
        np.testing.assert_array_equal(grads[0].numpy(), [2.0, 2.0, 2.0])
        np.testing.assert_array_equal(grads[1].numpy(), [0.0, 0.0])

    def test_non_scalar_loss_rejected(self):
        a = torch.ones(3, dtype=torch.float64, requires_grad=True)
        with pytest.raises(InvalidArgumentError):
            backward(a * 2, [a])


class TestAdamStep:
    def test_first_step_moves_by_lr_along_sign(self):
        param = torch.nn.Parameter(torch.tensor([1.0, -2.0, 0.5], dtype=torch.float64))
        grad = torch.tensor([0.1, -3.0, 2.0], dtype=torch.float64)
        state = make_adam([param], lr=0.01)
        adam_step([param], [grad], state, lr=0.01)
        expected = np.array([1.0, -2.0, 0.5]) - 0.01 * grad.numpy() / (np.abs(grad.numpy()) + 1e-8)
        np.testing.assert_allclose(param.detach().numpy(), expected, rtol=1e-12)

    def test_state_persists_between_steps(self):
        param = torch.nn.Parameter(torch.zeros(1, dtype=torch.float64))
        state = make_adam([param], lr=0.1)
        for _ in range(3):
            adam_step([param], [torch.ones(1, dtype=torch.float64)], state, lr=0.1)
        assert state.state[param]["step"].item() == 3
        assert param.item() == pytest.approx(-0.3, rel=1e-6)

    def test_rejects_bad_inputs(self):
        param = torch.nn.Parameter(torch.zeros(2, dtype=torch.float64))
        state = make_adam([param], lr=0.1)
        with pytest.raises(InvalidArgumentError):
            adam_step([param], [torch.ones(2, dtype=torch.float64)], state, lr=0.0)
        with pytest.raises(InvalidArgumentError):
            adam_step([param], [torch.ones(3, dtype=torch.float64)], state, lr=0.1)


class TestPcaEig:
    def test_descending_orthonormal_and_reconstructs_covariance(self, rng):
        X = rng.normal(size=(200, 4)) @ rng.normal(size=(4, 4))
        mean, eigs, vecs = pca_eig(X)
        np.testing.assert_allclose(mean, X.mean(axis=0))
        assert np.all(np.diff(eigs) <= 0)
        np.testing.assert_allclose(vecs.T @ vecs, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(vecs @ np.diag(eigs) @ vecs.T, np.cov(X, rowvar=False), atol=1e-10)

    def test_rank_deficient_clamps_to_zero(self, rng):
        X = rng.normal(size=(50, 2))
        X = np.column_stack([X, X[:, 0] + X[:, 1]])
        _, eigs, _ = pca_eig(X)
        assert eigs[-1] >= 0.0
        assert eigs[-1] < 1e-10

    def test_single_row_rejected(self):
        with pytest.raises(InsufficientDataError):
            pca_eig(np.ones((1, 3)))
