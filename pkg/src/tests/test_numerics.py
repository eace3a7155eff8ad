import numpy as np
import pytest

from domain.numerics import (
    ParamStore,
    Rng,
    Tensor,
    attend,
    concat,
    elementwise,
    init,
    masked_softmax,
    matmul,
    pairwise_add,
    propagate,
    stack,
)
from framework.exceptions import ContractError, DimensionError, DomainError, ValidationException


def leaf(rng, *shape):
    return Tensor(rng.uniform(-2, 2, size=shape), requires_grad=True)


def test_matmul_cases():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(matmul(np.eye(2), m).data, m)
    assert np.array_equal(matmul(m, [[1.0], [1.0]]).data, [[3.0], [7.0]])


def test_matmul_shape_error_names_both_shapes():
    with pytest.raises(DimensionError) as exc:
        matmul(np.zeros((2, 3)), np.zeros((2, 3)))
    assert "(2, 3) vs (2, 3)" in str(exc.value)


def test_matmul_gradient_is_ones_times_b_transpose(rng):
    a, b = leaf(rng, 3, 4), leaf(rng, 4, 2)
    (a @ b).sum().backward()
    np.testing.assert_allclose(a.grad, np.ones((3, 2)) @ b.data.T)


def test_elementwise_cases():
    assert np.array_equal(elementwise("relu", [-1.0, 0.0, 2.0]).data, [0.0, 0.0, 2.0])
    assert np.array_equal(elementwise("softmax_rows", [[0.0, 0.0]]).data, [[0.5, 0.5]])
    assert elementwise("sigmoid", 0.0).item() == 0.5
    assert np.allclose(elementwise("leaky_relu", [-1.0], slope=0.2).data, [-0.2])


def test_elementwise_rejects_unknown_op_and_bad_broadcast():
    with pytest.raises(ValidationException):
        elementwise("tanh", [1.0])
    with pytest.raises(DimensionError):
        elementwise("add", np.zeros((2, 3)), np.zeros((3, 2)))


def test_row_broadcast_allowed():
    out = Tensor(np.ones((2, 3))) + Tensor([1.0, 2.0, 3.0])
    assert np.array_equal(out.data, [[2, 3, 4], [2, 3, 4]])


def test_log_of_non_positive_is_domain_error():
    with pytest.raises(DomainError):
        Tensor([1.0, 0.0]).log()


def test_relu_gradient_at_zero_is_zero():
    x = Tensor([0.0, 1.0], requires_grad=True)
    x.relu().sum().backward()
    assert np.array_equal(x.grad, [0.0, 1.0])


def test_backward_cases():
    x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
    x.sum().backward()
    assert np.array_equal(x.grad, [1.0, 1.0, 1.0])

    y = Tensor([1.0, 2.0], requires_grad=True)
    (y * y).sum().backward()
    assert np.array_equal(y.grad, [2.0, 4.0])


def test_backward_requires_scalar():
    with pytest.raises(ContractError):
        Tensor([1.0, 2.0], requires_grad=True).backward()


def test_repeated_backward_accumulates():
    x = Tensor([1.0, 2.0], requires_grad=True)
    loss = (x * 3.0).sum()
    loss.backward()
    loss.backward()
    assert np.array_equal(x.grad, [6.0, 6.0])


def test_reused_tensor_gets_sum_of_contributions(rng, gradient_error):
    x = leaf(rng, 3, 3)

    def loss():
        return (x.sigmoid() * x.exp()).sum() + (x @ x).relu().mean()

    assert gradient_error(loss, [x]) < 1e-5


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_composite_gradients_match_finite_differences(seed, gradient_error):
    rng = np.random.default_rng(seed)
    a, b, w = leaf(rng, 4, 3), leaf(rng, 3), leaf(rng, 3, 2)
    pos = Tensor(rng.uniform(0.5, 2.0, size=(4, 2)), requires_grad=True)

    def loss():
        h = (a + b).leaky_relu() @ w
        s = h.softmax_rows() * pos.log() + h.log_softmax_rows() + h.log_sigmoid()
        picked = s[np.array([0, 2, 2]), np.array([1, 0, 0])]
        return s.T.reshape(8).mean() + picked.sum() * 0.5

    assert gradient_error(loss, [a, b, w, pos]) < 1e-5


def test_graph_ops_gradients(rng, gradient_error):
    mask = np.array([[1, 1, 0], [0, 1, 1], [0, 0, 0]])
    dst, src = leaf(rng, 3, 2), leaf(rng, 3, 2)
    values = leaf(rng, 3, 2, 4)
    adj = rng.uniform(0, 1, size=(3, 3))

    def loss():
        alpha = masked_softmax(pairwise_add(dst, src).leaky_relu(), mask)
        out = attend(alpha, values)
        mixed = propagate(adj, out)
        joined = concat([mixed, stack([values[0], values[1], values[2]])], axis=2)
        return (joined * joined).sum()

    assert gradient_error(loss, [dst, src, values]) < 1e-5


def test_masked_softmax_rows_and_empty_rows(rng):
    mask = np.array([[1, 0, 1], [1, 1, 1], [0, 0, 0]])
    scores = Tensor(rng.normal(size=(3, 3, 2)) * 10)
    alpha = masked_softmax(scores, mask).data
    assert np.all(alpha[~mask.astype(bool)] == 0.0)
    np.testing.assert_allclose(alpha[:2].sum(axis=1), 1.0, atol=1e-12)
    assert np.all(alpha[2] == 0.0)


def test_softmax_rows_sum_to_one(rng):
    y = Tensor(rng.uniform(-2, 2, size=(10, 7))).softmax_rows().data
    assert np.all(np.abs(y.sum(axis=1) - 1.0) < 1e-12)
    assert np.all((y > 0) & (y < 1))


def test_saturated_log_sigmoid_is_finite():
    out = Tensor([-800.0, 800.0]).log_sigmoid().data
    assert np.all(np.isfinite(out))
    assert out[1] == 0.0


def test_init_kinds():
    assert np.array_equal(init("zeros", [2, 2]).data, np.zeros((2, 2)))
    assert np.array_equal(init("ones", [3]).data, np.ones(3))
    w = init("uniform_fan_in", [16, 4], Rng(3))
    assert np.all(np.abs(w.data) <= 0.25)
    assert w.requires_grad


def test_init_is_deterministic():
    a = init("uniform_fan_in", [5, 3], Rng(7))
    b = init("uniform_fan_in", [5, 3], Rng(7))
    assert np.array_equal(a.data, b.data)


def test_init_rejects_zero_sized_dimension():
    with pytest.raises(ContractError):
        init("zeros", [3, 0])
    with pytest.raises(ContractError):
        init("ones", [])


def test_rng_children_are_independent_of_draw_order():
    root = Rng(11)
    first = root.child("encoder").uniform(0, 1, [4])
    root.uniform(0, 1, [100])
    again = Rng(11).child("encoder").uniform(0, 1, [4])
    assert np.array_equal(first, again)
    assert not np.array_equal(first, Rng(11).child("decoder").uniform(0, 1, [4]))


def test_rng_state_restores_stream():
    rng = Rng(5)
    rng.normal(size=3)
    state = rng.get_state()
    expected = rng.normal(size=4)
    assert np.array_equal(Rng.from_state(state).normal(size=4), expected)


def test_param_store_order_and_duplicates():
    store = ParamStore()
    store.add("b", init("zeros", [2]))
    store.add("a", init("ones", [2, 2]))
    assert store.names() == ["b", "a"]
    assert store.num_parameters() == 6
    with pytest.raises(ValidationException):
        store.add("a", init("ones", [1]))
