"""Tests for projection-encoded submodules."""

import numpy as np
import pytest

from cstar_fusion import (
    COMPLEX,
    QUATERNION,
    AlgebraElement,
    IndexOutOfRange,
    ModuleShape,
    ModuleVector,
    QuaternionUnsupported,
    ShapeMismatch,
    Submodule,
    alg_norm,
    block_submodule,
    complement,
    inner_product,
    left_action,
    project,
    span_submodule,
    validate_projection,
)
from helpers import random_algebra, random_span_submodule, random_vector


class TestBlockSubmodules:
    def test_selector_example(self):
        shape = ModuleShape(COMPLEX, (1, 1, 1))
        sub = block_submodule(shape, {1, 2})
        np.testing.assert_allclose([f[0, 0] for f in sub.fibers], [1, 1, 0])

    def test_empty_and_full(self):
        shape = ModuleShape(QUATERNION, (1, 1, 1))
        zero = block_submodule(shape, set())
        np.testing.assert_allclose(zero.selector_bits(), 0)
        full = block_submodule(shape, {1, 2, 3})
        np.testing.assert_allclose(full.selector_bits(), 1)

    def test_index_out_of_range(self):
        shape = ModuleShape(COMPLEX, (1, 1))
        with pytest.raises(IndexOutOfRange):
            block_submodule(shape, {3})
        with pytest.raises(IndexOutOfRange):
            block_submodule(shape, {0})


class TestSpanSubmodules:
    def test_diagonal_projector(self):
        shape = ModuleShape(COMPLEX, (2,))
        sub = span_submodule(shape, [[np.array([1.0, 1.0])]])
        np.testing.assert_allclose(sub.fibers[0], [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)

    def test_empty_span_is_zero(self):
        shape = ModuleShape(COMPLEX, (2,))
        sub = span_submodule(shape, [[]])
        np.testing.assert_allclose(sub.fibers[0], 0)

    def test_full_span_is_identity(self):
        shape = ModuleShape(COMPLEX, (2,))
        sub = span_submodule(shape, [[np.array([1, 0]), np.array([0, 1])]])
        np.testing.assert_allclose(sub.fibers[0], np.eye(2), atol=1e-15)

    def test_zero_and_dependent_vectors_dropped(self):
        shape = ModuleShape(COMPLEX, (3,))
        sub = span_submodule(
            shape,
            [[np.zeros(3), np.array([1, 0, 0]), np.array([2, 0, 0]), np.array([0, 1, 0])]],
        )
        np.testing.assert_allclose(np.trace(sub.fibers[0]).real, 2.0, atol=1e-12)
        assert validate_projection(sub)

    def test_quaternion_unsupported(self):
        with pytest.raises(QuaternionUnsupported):
            span_submodule(ModuleShape(QUATERNION, (1,)), [[np.array([1.0])]])


class TestProjectAndComplement:
    def test_selector_projection(self):
        shape = ModuleShape(COMPLEX, (1, 1))
        sub = block_submodule(shape, {1})
        x = ModuleVector(shape, [[5], [7]])
        np.testing.assert_allclose(np.concatenate(project(sub, x).fibers), [5, 0])

    def test_identity_projection(self):
        shape = ModuleShape(COMPLEX, (2, 3))
        full = block_submodule(shape, {1, 2})
        x = random_vector(np.random.default_rng(31), shape)
        got = project(full, x)
        for gf, xf in zip(got.fibers, x.fibers):
            np.testing.assert_allclose(gf, xf)

    def test_rank_one_projection_value(self):
        shape = ModuleShape(COMPLEX, (2,))
        sub = Submodule(shape, [np.array([[0.5, 0.5], [0.5, 0.5]])])
        got = project(sub, ModuleVector(shape, [[1, 0]]))
        np.testing.assert_allclose(got.fibers[0], [0.5, 0.5])

    def test_complement_examples(self):
        shape = ModuleShape(QUATERNION, (1, 1, 1))
        sub = block_submodule(shape, {1, 3})
        np.testing.assert_allclose(complement(sub).selector_bits(), [0, 1, 0])
        cshape = ModuleShape(COMPLEX, (2,))
        diag = Submodule(cshape, [np.array([[0.5, 0.5], [0.5, 0.5]])])
        np.testing.assert_allclose(
            complement(diag).fibers[0], [[0.5, -0.5], [-0.5, 0.5]]
        )
        full = block_submodule(cshape, {1})
        np.testing.assert_allclose(complement(full).fibers[0], 0)

    def test_complement_involution(self):
        rng = np.random.default_rng(32)
        sub = random_span_submodule(rng, ModuleShape(COMPLEX, (3, 2)))
        twice = complement(complement(sub))
        for tf, sf in zip(twice.fibers, sub.fibers):
            np.testing.assert_allclose(tf, sf, atol=1e-14)

    def test_projection_idempotent(self):
        rng = np.random.default_rng(33)
        shape = ModuleShape(COMPLEX, (3, 2))
        sub = random_span_submodule(rng, shape)
        x = random_vector(rng, shape)
        once = project(sub, x)
        twice = project(sub, once)
        for a, b in zip(once.fibers, twice.fibers):
            np.testing.assert_allclose(a, b, atol=1e-13)

    def test_decomposition_and_orthogonality(self):
        rng = np.random.default_rng(34)
        for kind, dims in ((COMPLEX, (3, 2)), (QUATERNION, (1, 1))):
            shape = ModuleShape(kind, dims)
            if kind == COMPLEX:
                sub = random_span_submodule(rng, shape)
            else:
                sub = block_submodule(shape, {1})
            x, y = random_vector(rng, shape), random_vector(rng, shape)
            recomposed = project(sub, x) + project(complement(sub), x)
            for rf, xf in zip(recomposed.fibers, x.fibers):
                np.testing.assert_allclose(rf, xf, atol=1e-12)
            cross = inner_product(project(sub, x), project(complement(sub), y))
            assert alg_norm(cross) <= 1e-12 * max(1.0, alg_norm(inner_product(x, y)))

    def test_projection_module_linear(self):
        rng = np.random.default_rng(35)
        shape = ModuleShape(COMPLEX, (2, 3))
        sub = random_span_submodule(rng, shape)
        a = random_algebra(rng, COMPLEX, 2)
        x = random_vector(rng, shape)
        left = project(sub, left_action(a, x))
        right = left_action(a, project(sub, x))
        for lf, rf in zip(left.fibers, right.fibers):
            np.testing.assert_allclose(lf, rf, atol=1e-12)

    def test_projection_commutes_with_central_quaternions(self):
        rng = np.random.default_rng(36)
        shape = ModuleShape(QUATERNION, (1, 1))
        sub = block_submodule(shape, {2})
        a = AlgebraElement.from_real(rng.uniform(0.5, 2, size=2), QUATERNION)
        x = random_vector(rng, shape)
        left = project(sub, left_action(a, x))
        right = left_action(a, project(sub, x))
        for lf, rf in zip(left.fibers, right.fibers):
            np.testing.assert_allclose(lf, rf, atol=1e-12)

    def test_project_shape_mismatch(self):
        sub = block_submodule(ModuleShape(COMPLEX, (1, 1)), {1})
        x = ModuleVector(ModuleShape(COMPLEX, (2,)), [[1, 0]])
        with pytest.raises(ShapeMismatch):
            project(sub, x)


class TestValidation:
    def test_blocks_validate(self):
        shape = ModuleShape(COMPLEX, (2, 3))
        assert validate_projection(block_submodule(shape, {2}))

    def test_non_hermitian_rejected(self):
        shape = ModuleShape(COMPLEX, (2,))
        bad = Submodule(shape, [np.array([[1, 1], [0, 0]])])
        assert not validate_projection(bad)

    def test_non_idempotent_rejected(self):
        shape = ModuleShape(COMPLEX, (1,))
        half = Submodule(shape, [np.array([[0.5]])])
        assert not validate_projection(half)


class TestSerialization:
    def test_selector_payload(self):
        shape = ModuleShape(QUATERNION, (1, 1))
        sub = block_submodule(shape, {2})
        back = Submodule.from_payload(sub.to_payload())
        np.testing.assert_allclose(back.selector_bits(), sub.selector_bits())

    def test_projection_payload(self):
        rng = np.random.default_rng(37)
        sub = random_span_submodule(rng, ModuleShape(COMPLEX, (2, 3)))
        back = Submodule.from_payload(sub.to_payload())
        for bf, sf in zip(back.fibers, sub.fibers):
            np.testing.assert_allclose(bf, sf)

    def test_span_payload(self):
        payload = {
            "kind": COMPLEX,
            "dims": [2],
            "fibers": [{"span": [[[1, 0], [1, 0]]]}],
        }
        sub = Submodule.from_payload(payload)
        np.testing.assert_allclose(sub.fibers[0], [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)
