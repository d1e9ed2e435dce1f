#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dtc {

// Norm below which normalize() refuses to divide.
inline constexpr double kEpsZero = 1e-12;

// Keeps the tau largest-magnitude entries and zeroes the rest. Ties at the
// threshold keep the lowest indices.
std::vector<double> truncate(std::span<const double> v, std::size_t tau);

// Exact minimizer of sum_i (u_i - v_i)^2 + lambda * sum_j |u_{j+1} - u_j|.
// Note there is no 1/2 on the quadratic term, so this equals the usual
// total-variation prox with weight lambda / 2.
std::vector<double> fuse(std::span<const double> v, double lambda);

// truncate(fuse(v, lambda), tau): fusion first, truncation second.
std::vector<double> truncatefuse(std::span<const double> v, std::size_t tau, double lambda);

// v / ||v||_2. Throws DegenerateVector if ||v||_2 <= kEpsZero.
std::vector<double> normalize(std::span<const double> v);

// sum_j |v_{j+1} - v_j|, i.e. ||D v||_1 for the first-difference matrix D.
double total_variation(std::span<const double> v);

// Objective minimized by fuse().
double fuse_objective(std::span<const double> u, std::span<const double> v, double lambda);

}  // namespace dtc
