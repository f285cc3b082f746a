// tpms.cpp: two-point measurement distributions and correction factors

#include "tpf/tpms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tpf/errors.hpp"
#include "tpf/io.hpp"

namespace tpf::tpms {

namespace {

struct SpectralCluster {
    double value;
    Matrix projector;
};

std::vector<SpectralCluster> spectral_clusters(const HermitianOperator& op, double cluster_tol)
{
    const auto eig = eig_hermitian(op);
    const Eigen::Index d = eig.values.size();
    const double range = eig.values(d - 1) - eig.values(0);
    const double tol = cluster_tol * std::max(1.0, range);
    std::vector<SpectralCluster> out;
    Eigen::Index start = 0;
    for (Eigen::Index k = 1; k <= d; ++k) {
        if (k < d && eig.values(k) - eig.values(k - 1) <= tol) continue;
        const auto cols = eig.vectors.middleCols(start, k - start);
        out.push_back({eig.values.segment(start, k - start).mean(), cols * cols.adjoint()});
        start = k;
    }
    return out;
}

double trace_real(const Matrix& m)
{
    return m.trace().real();
}

} // namespace

OutcomeDistribution tpms_distribution(const DensityMatrix& rho0, const Superoperator& map_t,
                                      const HermitianOperator& O0, const HermitianOperator& Ot, double cluster_tol)
{
    const auto first = spectral_clusters(O0, cluster_tol);
    const auto second = spectral_clusters(Ot, cluster_tol);

    OutcomeDistribution out;
    Matrix dephased = Matrix::Zero(rho0.dim(), rho0.dim());
    std::vector<std::pair<double, double>> pairs;
    for (const auto& n : first) {
        const Matrix post = n.projector * rho0.matrix() * n.projector;
        dephased += post;
        const Matrix evolved = tpf::apply(map_t, post);
        for (const auto& m : second) {
            double p = trace_real(m.projector * evolved);
            if (p < -1e-12) {
                std::ostringstream msg;
                msg << "negative joint probability " << p << " for outcome " << m.value - n.value;
                throw std::runtime_error(msg.str());
            }
            if (p < 0.0) p = 0.0;
            pairs.emplace_back(m.value - n.value, p);
        }
    }
    out.coherence_norm = (rho0.matrix() - dephased).norm();
    out.coherence_warning = out.coherence_norm > 1e-9;

    std::sort(pairs.begin(), pairs.end());
    const double span = pairs.back().first - pairs.front().first;
    const double tol = cluster_tol * std::max(1.0, span);
    double total = 0.0;
    for (const auto& pr : pairs) total += pr.second;

    std::size_t k = 0;
    while (k < pairs.size()) {
        std::size_t j = k + 1;
        while (j < pairs.size() && pairs[j].first - pairs[j - 1].first <= tol) ++j;
        double w = 0.0, wx = 0.0, plain = 0.0;
        for (std::size_t i = k; i < j; ++i) {
            w += pairs[i].second;
            wx += pairs[i].second * pairs[i].first;
            plain += pairs[i].first;
        }
        out.outcomes.push_back(w > 0.0 ? wx / w : plain / static_cast<double>(j - k));
        out.probs.push_back(w / total);
        k = j;
    }
    return out;
}

double exp_average(const OutcomeDistribution& dist, double beta)
{
    double s = 0.0;
    for (std::size_t i = 0; i < dist.outcomes.size(); ++i) s += dist.probs[i] * std::exp(-beta * dist.outcomes[i]);
    return s;
}

double moment(const OutcomeDistribution& dist, int k)
{
    double s = 0.0;
    for (std::size_t i = 0; i < dist.outcomes.size(); ++i) s += dist.probs[i] * std::pow(dist.outcomes[i], k);
    return s;
}

LambdaU lambda_u(const Superoperator& map_t, const HermitianOperator& K_t, double beta)
{
    const int d = K_t.dim();
    const Matrix rho_g = gibbs_state(K_t, beta).matrix();
    const Matrix id = Matrix::Identity(d, d);
    const HermitianOperator image(tpf::apply(map_t, id), 1e-9);
    LambdaU out;
    out.direct = trace_real(rho_g * image.matrix());
    out.adjoint = trace_real(tpf::apply(hs_adjoint(map_t), rho_g));
    out.mixed_overlap = d * trace_real(rho_g * tpf::apply(map_t, id / static_cast<double>(d)));
    out.bound = lambda_max(image);
    return out;
}

FactorWithBound lambda_w(const Superoperator& map_t, const HermitianOperator& Ow_t, const HermitianOperator& K_t,
                         const HermitianOperator& P_t, double beta)
{
    const int d = K_t.dim();
    const HermitianOperator image(tpf::apply(map_t, Matrix::Identity(d, d)), 1e-9);
    const double shift = lambda_min(Ow_t);
    const HermitianOperator shifted = Ow_t - HermitianOperator::identity(d) * shift;
    const double tr = trace_real(exp_hermitian(shifted, -beta).matrix() * image.matrix());
    const double value = tr * std::exp(-beta * shift - log_partition(K_t, beta));
    const double bound = std::exp(beta * lambda_max(P_t)) * lambda_max(image);
    return {value, bound};
}

FactorWithBound heat_fluctuation(const DensityMatrix& rho0, const Superoperator& map_t, const HermitianOperator& P_t,
                                 double beta)
{
    const int d = P_t.dim();
    const Matrix rho_t = tpf::apply(map_t, rho0.matrix());
    const double shift = lambda_min(P_t);
    const HermitianOperator shifted = P_t - HermitianOperator::identity(d) * shift;
    const double tr = trace_real(exp_hermitian(shifted, -beta).matrix() * rho_t);
    // overflow near singular maps surfaces as inf rather than a domain error
    return {tr * std::exp(-beta * shift), std::exp(-beta * shift)};
}

FreeEnergies free_energies(const HermitianOperator& K_t, const HermitianOperator& K_0, double beta)
{
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    const double lz0 = log_partition(K_0, beta);
    const double lzt = log_partition(K_t, beta);
    return {lz0, lzt, -(lzt - lz0) / beta};
}

double noneq_free_energy(const DensityMatrix& rho, const HermitianOperator& K, double beta)
{
    const auto eig = eig_hermitian(rho.as_operator());
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double p = eig.values(i);
        if (p > 1e-300) entropy -= p * std::log(p);
    }
    return K.expectation(rho.matrix()) - entropy / beta;
}

double dissipated_work_bound(const HermitianOperator& P_t, const Superoperator& map_t, double beta)
{
    const int d = P_t.dim();
    const HermitianOperator image(tpf::apply(map_t, Matrix::Identity(d, d)), 1e-9);
    return -lambda_max(P_t) - std::log(lambda_max(image)) / beta;
}

FluctuationReport fluctuation_report(double t, double beta, const Superoperator& map_t, const HermitianOperator& K_0,
                                     const HermitianOperator& K_t, const HermitianOperator& P_t)
{
    const DensityMatrix rho0 = gibbs_state(K_0, beta);
    const HermitianOperator ow = K_t - P_t;

    FluctuationReport r;
    r.t = t;
    r.beta = beta;
    r.lambda_u = lambda_u(map_t, K_t, beta).direct;
    const auto lw = lambda_w(map_t, ow, K_t, P_t, beta);
    r.lambda_w = lw.value;
    r.lambda_w_bound = lw.bound;
    r.exp_avg_w = exp_average(tpms_distribution(rho0, map_t, K_0, ow), beta);
    r.exp_avg_q = heat_fluctuation(rho0, map_t, P_t, beta).value;
    r.delta_F_bar = free_energies(K_t, K_0, beta).delta_F_bar;
    r.mean_w = ow.expectation(tpf::apply(map_t, rho0.matrix())) - K_0.expectation(rho0.matrix());
    r.dissipated_bound = dissipated_work_bound(P_t, map_t, beta);
    return r;
}

std::string report_csv_header()
{
    return "t,beta,lambda_u,lambda_w,lambda_w_bound,exp_avg_w,exp_avg_q,delta_F_bar,mean_w,dissipated_bound";
}

std::string report_csv_row(const FluctuationReport& r)
{
    std::string s;
    for (double v : {r.t, r.beta, r.lambda_u, r.lambda_w, r.lambda_w_bound, r.exp_avg_w, r.exp_avg_q, r.delta_F_bar,
                     r.mean_w, r.dissipated_bound}) {
        if (!s.empty()) s += ',';
        s += io::format_number(v);
    }
    return s;
}

} // namespace tpf::tpms
