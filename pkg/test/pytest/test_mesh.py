"""
Tests for `EPAP.mesh`
"""
import numpy as np
import pytest

from EPAP.mesh import Mesh, NonFiniteFieldError, finite_output


class TestMesh:
    def test_init(self):
        mesh = Mesh((100,), (1.0,))
        assert mesh.dim == 1
        assert mesh.shape == (100,)
        assert mesh.dx == (0.01,)
        assert mesh.bc == ('periodic',)
        assert mesh.is_periodic

    def test_init_2d(self):
        mesh = Mesh((8, 16), (1.0, 2.0), bc=('periodic', 'dirichlet0'))
        assert mesh.dim == 2
        assert mesh.size == 128
        assert mesh.cell_volume == pytest.approx(0.125**2)
        assert not mesh.is_periodic

    def test_scalar_arguments(self):
        mesh = Mesh(32, 20.0, bc='dirichlet0')
        assert mesh.n == (32,)
        assert mesh.length == (20.0,)
        assert mesh.bc == ('dirichlet0',)

    @pytest.mark.parametrize('n,length,bc', [
        ((3,), (1.0,), None),
        ((4, 4, 4), (1.0, 1.0, 1.0), None),
        ((8,), (0.0,), None),
        ((8,), (1.0,), ('neumann',)),
        ((8, 8), (1.0,), None),
    ])
    def test_invalid(self, n, length, bc):
        with pytest.raises(ValueError):
            Mesh(n, length, bc)

    def test_equality(self):
        assert Mesh((8,), (1.0,)) == Mesh((8,), (1.0,))
        assert Mesh((8,), (1.0,)) != Mesh((8,), (1.0,), 'dirichlet0')
        assert hash(Mesh((8,), (1.0,))) == hash(Mesh((8,), (1.0,)))

    def test_coordinates(self):
        mesh = Mesh((4, 8), (1.0, 2.0))
        x1, x2 = mesh.coordinates()
        assert x1.shape == (4, 8)
        assert np.all(x1[:, 0] == np.array([0, 0.25, 0.5, 0.75]))
        assert np.all(x2[0, :] == np.arange(8)*0.25)

    def test_refined(self):
        mesh = Mesh((10,), (20.0,)).refined()
        assert mesh.n == (20,)
        assert mesh.length == (20.0,)

    def test_check_fields(self, mesh2d: Mesh):
        mesh2d.check_scalar(mesh2d.zeros())
        mesh2d.check_vector(mesh2d.zeros_vector())
        with pytest.raises(ValueError):
            mesh2d.check_scalar(np.zeros(8))
        with pytest.raises(ValueError):
            mesh2d.check_vector(mesh2d.zeros())


class TestStencils:
    def test_central_diff_constant(self, mesh1d: Mesh):
        assert np.all(mesh1d.central_diff(np.full(mesh1d.shape, 3.0), 0) == 0)

    def test_central_diff_sine(self):
        mesh = Mesh((8,), (1.0,))
        k = np.arange(8)
        f = np.sin(2*np.pi*k/8)
        expected = (np.sin(2*np.pi*(k+1)/8) - np.sin(2*np.pi*(k-1)/8))*4
        np.testing.assert_allclose(mesh.central_diff(f, 0), expected, atol=1e-14)

    def test_central_diff_wraparound(self):
        mesh = Mesh((4,), (1.0,))
        f = np.array([0.0, 1.0, 0.0, -1.0])
        np.testing.assert_allclose(mesh.central_diff(f, 0), [4.0, 0.0, -4.0, 0.0])

    def test_bad_direction(self, mesh1d: Mesh):
        with pytest.raises(ValueError):
            mesh1d.central_diff(mesh1d.zeros(), 1)
        with pytest.raises(ValueError):
            mesh1d.second_diff(mesh1d.zeros(), -1)

    def test_second_diff(self):
        mesh = Mesh((4,), (4.0,))
        f = np.array([1.0, 0.0, 1.0, 0.0])
        np.testing.assert_allclose(mesh.second_diff(f, 0), [-2.0, 2.0, -2.0, 2.0])

    @pytest.mark.parametrize('n,K', [(16, 1), (32, 3), (64, 7)])
    def test_second_diff_eigenvalue(self, n, K):
        mesh = Mesh((n,), (1.0,))
        x = mesh.axis(0)
        f = np.cos(2*np.pi*K*x)
        eig = -4/mesh.dx[0]**2*np.sin(np.pi*K*mesh.dx[0])**2
        np.testing.assert_allclose(mesh.second_diff(f, 0), eig*f, rtol=1e-12, atol=1e-12*abs(eig))

    def test_telescoping(self, mesh2d: Mesh):
        rng = np.random.default_rng(1)
        f = rng.normal(size=mesh2d.shape)
        for m in range(2):
            assert abs(np.sum(mesh2d.central_diff(f, m))) < 1e-12
            assert abs(np.sum(mesh2d.second_diff(f, m))) < 1e-10

    def test_linearity(self, mesh1d: Mesh):
        rng = np.random.default_rng(2)
        f, g = rng.normal(size=(2,) + mesh1d.shape)
        np.testing.assert_allclose(
            mesh1d.laplacian(2*f - 3*g),
            2*mesh1d.laplacian(f) - 3*mesh1d.laplacian(g),
            atol=1e-10
        )

    def test_divergence_second_order(self):
        errors = []
        for n in (64, 128):
            mesh = Mesh((n,), (1.0,))
            x = mesh.axis(0)
            v = np.sin(2*np.pi*x)[np.newaxis]
            errors.append(np.max(np.abs(mesh.central_divergence(v) - 2*np.pi*np.cos(2*np.pi*x))))
        assert errors[0]/errors[1] == pytest.approx(4, rel=0.05)

    def test_divergence_of_curl(self):
        mesh = Mesh((32, 32), (1.0, 1.0))
        x1, x2 = mesh.coordinates()
        # v = (d psi/d x2, -d psi/d x1) with psi = sin(2 pi x1) sin(2 pi x2)
        v = np.stack([
            2*np.pi*np.sin(2*np.pi*x1)*np.cos(2*np.pi*x2),
            -2*np.pi*np.cos(2*np.pi*x1)*np.sin(2*np.pi*x2),
        ])
        div = mesh.central_divergence(v)
        assert np.max(np.abs(div)) < 1e-10
        assert np.all(mesh.central_divergence(np.ones((2, 32, 32))) == 0)

    def test_gradient_shape(self, mesh2d: Mesh):
        assert mesh2d.central_gradient(mesh2d.zeros()).shape == (2, 8, 8)

    def test_mean(self):
        mesh = Mesh((4,), (1.0,))
        assert mesh.mean(np.full(4, 2.5)) == 2.5
        assert mesh.mean(np.array([1.0, -1.0, 1.0, -1.0])) == 0
        assert mesh.mean(np.array([1.0, 1.0, 1.0, 2.0])) == 1.25

    def test_non_finite(self, mesh1d: Mesh):
        f = mesh1d.zeros()
        f[3] = np.nan
        with pytest.raises(NonFiniteFieldError):
            mesh1d.central_diff(f, 0)
        with pytest.raises(FloatingPointError):
            mesh1d.laplacian(f)


def test_finite_output():
    @finite_output
    def make(value):
        return np.array([1.0, value])
    assert np.all(make(2.0) == [1.0, 2.0])
    with pytest.raises(NonFiniteFieldError):
        make(np.inf)
