#include "ctlab/gff.hpp"

#include <cmath>

#include "ctlab/parallel.hpp"
#include "ctlab/summary.hpp"

namespace ctlab {

GffModel GffModel::build(const GreenKernel& kernel, const GffOptions& opt) {
    int n = (int)kernel.c.rows();
    require(n >= 1 && kernel.c.cols() == n, ErrorCode::InvalidParameters,
            "kernel matrix must be square and nonempty");
    require(kernel.root >= 0 && kernel.root < n, ErrorCode::InvalidVertex,
            "kernel root outside the vertex range");
    GffModel m;
    m.n_ = n;
    m.root_ = kernel.root;
    if (n == 1) {
        m.factor_.resize(1, 0);
        return m;
    }

    // kernel restricted to non-root vertices, kept in original id order
    std::vector<int> keep;
    keep.reserve((std::size_t)n - 1);
    for (int v = 0; v < n; ++v)
        if (v != kernel.root) keep.push_back(v);
    int k = n - 1;
    Eigen::MatrixXd b(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            b(i, j) = kernel.c(keep[(std::size_t)i], keep[(std::size_t)j]);

    // pivoted Cholesky on the diagonal, stopping at the numerical rank
    Eigen::VectorXd diag = b.diagonal();
    double top = diag.maxCoeff();
    require(diag.minCoeff() >= -1e-9 * std::max(top, 1.0),
            ErrorCode::NumericalFailure,
            "kernel has a significantly negative diagonal entry");
    std::vector<int> perm((std::size_t)k);
    for (int i = 0; i < k; ++i) perm[(std::size_t)i] = i;
    Eigen::MatrixXd low = Eigen::MatrixXd::Zero(k, k); // rows follow perm
    int rank = 0;
    for (int col = 0; col < k; ++col) {
        int best = col;
        for (int i = col + 1; i < k; ++i)
            if (diag(perm[(std::size_t)i]) > diag(perm[(std::size_t)best]))
                best = i;
        std::swap(perm[(std::size_t)col], perm[(std::size_t)best]);
        low.row(col).swap(low.row(best));
        int p = perm[(std::size_t)col];
        double piv = diag(p);
        if (piv <= opt.pivot_tol * std::max(top, 0.0) || piv <= 0.0) break;
        double l = std::sqrt(piv);
        low(col, col) = l;
        for (int i = col + 1; i < k; ++i) {
            int q = perm[(std::size_t)i];
            double v = b(q, p) - low.row(i).head(col).dot(low.row(col).head(col));
            v /= l;
            low(i, col) = v;
            diag(q) -= v * v;
        }
        ++rank;
    }

    // undo the pivoting and reinsert the zero root row
    m.factor_ = Eigen::MatrixXd::Zero(n, rank);
    for (int i = 0; i < k; ++i)
        m.factor_.row(keep[(std::size_t)perm[(std::size_t)i]]) =
            low.row(i).head(rank);

    double bnorm = b.norm();
    Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            recon(i, j) = m.factor_.row(keep[(std::size_t)i])
                              .dot(m.factor_.row(keep[(std::size_t)j]));
    m.residual_ = bnorm > 0.0 ? (recon - b).norm() / bnorm : 0.0;
    require(m.residual_ <= opt.residual_tol, ErrorCode::NumericalFailure,
            "square-root factor misses the kernel: relative error " +
                format_double(m.residual_));
    return m;
}

std::vector<double> GffModel::sample(Rng& rng) const {
    int r = rank();
    Eigen::VectorXd z(r);
    for (int i = 0; i < r; ++i) z(i) = rng.normal();
    std::vector<double> out((std::size_t)n_, 0.0);
    for (int v = 0; v < n_; ++v)
        if (v != root_) out[(std::size_t)v] = factor_.row(v).dot(z);
    return out;
}

ScalarEstimate estimate_expected_max(const GffModel& model, int replicas,
                                     std::uint64_t seed,
                                     const GffOptions& opt) {
    require(replicas >= 2, ErrorCode::InvalidParameters,
            "need at least 2 replicas for a standard error");
    std::vector<double> maxima((std::size_t)replicas);
    parallel_for(replicas, opt.threads, [&](int r) {
        Rng rng(mix_seed(seed, {(std::uint64_t)r}));
        std::vector<double> field = model.sample(rng);
        double best = 0.0; // the pinned root contributes 0
        for (double v : field)
            if (v > best) best = v;
        maxima[(std::size_t)r] = best;
    });
    MeanSe ms = mean_and_se(maxima);
    return {ms.mean, ms.se, replicas, seed};
}

double dlp_ratio(const WeightedGraph& g, double t_cov, double emax) {
    require(std::isfinite(t_cov) && t_cov > 0.0, ErrorCode::InvalidParameters,
            "cover time must be positive and finite");
    require(std::isfinite(emax), ErrorCode::InvalidParameters,
            "field maximum must be finite");
    require(emax > 0.0, ErrorCode::DegenerateField,
            "expected field maximum is not positive");
    require(g.volume() > 0.0, ErrorCode::DegenerateField,
            "graph has no edges, so the stationary volume vanishes");
    return t_cov / (g.volume() * emax * emax);
}

} // namespace ctlab
