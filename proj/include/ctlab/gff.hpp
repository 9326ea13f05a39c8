#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ctlab/graph.hpp"
#include "ctlab/resistance.hpp"
#include "ctlab/rng.hpp"

namespace ctlab {

struct GffOptions {
    // pivot threshold relative to the largest initial diagonal entry
    double pivot_tol = 1e-12;
    // enforced bound on the factorization's relative Frobenius residual
    double residual_tol = 1e-8;
    int threads = 1;
};

// Gaussian field pinned to zero at the kernel's root, with covariance equal
// to the kernel off the root: increments then satisfy
// E (eta_x - eta_y)^2 = R(x, y).
class GffModel {
  public:
    // Pivoted Cholesky of the kernel restricted to non-root vertices,
    // tolerating semidefiniteness: pivots below pivot_tol * max diagonal end
    // the factorization, so null directions simply contribute no column.
    static GffModel build(const GreenKernel& kernel, const GffOptions& opt = {});

    int vertex_count() const { return n_; }
    int root() const { return root_; }
    int rank() const { return (int)factor_.cols(); }
    // rows indexed by original vertex id; the root row is zero
    const Eigen::MatrixXd& factor() const { return factor_; }
    // relative Frobenius error of factor * factor^T against the kernel
    double kernel_residual() const { return residual_; }

    // factor applied to rank() i.i.d. standard normals; entry root() is 0
    std::vector<double> sample(Rng& rng) const;

  private:
    GffModel() = default;

    int n_ = 1;
    int root_ = 0;
    double residual_ = 0.0;
    Eigen::MatrixXd factor_; // n x rank
};

struct ScalarEstimate {
    double mean = 0.0;
    double se = 0.0;
    int replicas = 0;
    std::uint64_t seed = 0;
};

// Monte Carlo mean of max_x eta_x over all vertices; the root participates
// with its pinned value 0, so the result is never negative. Replica r draws
// from the substream mix_seed(seed, {r}); reduction is in replica order.
ScalarEstimate estimate_expected_max(const GffModel& model, int replicas,
                                     std::uint64_t seed,
                                     const GffOptions& opt = {});

// t_cov / (volume * emax^2), the dimensionless comparison of the cover time
// against the field maximum. Throws DegenerateField when emax <= 0 or the
// graph has no edges.
double dlp_ratio(const WeightedGraph& g, double t_cov, double emax);

} // namespace ctlab
