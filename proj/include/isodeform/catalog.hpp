#pragma once

// Built-in charts. Each chart's normal is the generalized cross product of
// its coordinate derivatives in index order; the orientation of each is noted.

#include <string>

#include "isodeform/geometry.hpp"

namespace isodeform::catalog {

/// (u1, ..., un, 0) on [-1, 1]^n; N = (-1)^n e_(n+1). A = 0.
geometry::Chart flat(int n);
/// flat(2).
geometry::Chart plane2();
/// ((R + r cos u2) cos u1, (R + r cos u2) sin u1, r sin u2) on [0, 2 pi]^2;
/// N points away from the core circle.
geometry::Chart torus2(double major, double minor);
/// Hyperspherical coordinates of the round 3-sphere of radius r in R^4 on
/// [0.4, 1.1]^3; N = f / r (outward), A = -Id / r.
geometry::Chart sphere3(double r);
/// sphere3 with the ambient axes scaled by (a, b, c, d); N outward.
geometry::Chart ellipsoid3(double a, double b, double c, double d);
/// Monge graph (u1, u2, u3, phi) on [-0.5, 0.5]^3; N has negative last
/// component, so A = -Hess(phi) at a critical point of phi.
geometry::Chart graph3(const std::string& phi);
/// S^3(r) x R in R^5 on [0.4, 1.1]^3 x [-0.5, 0.5]; N outward from the axis,
/// A has rank 3 with the u4 direction as kernel.
geometry::Chart sphcyl4(double r);

}  // namespace isodeform::catalog
