// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each criterion is self-contained and pins its tolerance
// in code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ues/ues.hpp"

using namespace ues;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::ostream&)> run;
};

RunArtifacts run_preset(const std::string& name, std::optional<double> t_end = std::nullopt,
                        std::optional<double> omega = std::nullopt) {
    RunOptions opt;
    opt.t_end_override = t_end;
    opt.omega_override = omega;
    return run_scenario(parse_scenario(load_config(name)), opt);
}

double tail_sup_error(const RunReport& rep) {
    double sup = 0.0;
    for (std::size_t s = rep.times.size() / 2; s < rep.times.size(); ++s) {
        sup = std::max(sup, rep.agent_errors[s].maxCoeff());
    }
    return sup;
}

double error_near(const RunReport& rep, double t) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < rep.times.size(); ++s) {
        if (std::abs(rep.times[s] - t) < std::abs(rep.times[best] - t)) best = s;
    }
    return rep.agent_errors[best].maxCoeff();
}

double window_max_error(const RunReport& rep, double lo, double hi) {
    double worst = 0.0;
    for (std::size_t s = 0; s < rep.times.size(); ++s) {
        if (rep.times[s] >= lo && rep.times[s] <= hi) {
            worst = std::max(worst, rep.agent_errors[s].maxCoeff());
        }
    }
    return worst;
}

std::array<double, 3> charpoly_eigs3(const Eigen::Matrix3d& A) {
    const double p1 = A(0, 1) * A(0, 1) + A(0, 2) * A(0, 2) + A(1, 2) * A(1, 2);
    if (p1 == 0.0) {
        std::array<double, 3> d = {A(0, 0), A(1, 1), A(2, 2)};
        std::sort(d.begin(), d.end());
        return d;
    }
    const double q = A.trace() / 3.0;
    const double p2 = (A(0, 0) - q) * (A(0, 0) - q) + (A(1, 1) - q) * (A(1, 1) - q) +
                      (A(2, 2) - q) * (A(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    const Eigen::Matrix3d B = (A - q * Eigen::Matrix3d::Identity()) / p;
    const double detB = B(0, 0) * (B(1, 1) * B(2, 2) - B(1, 2) * B(2, 1)) -
                        B(0, 1) * (B(1, 0) * B(2, 2) - B(1, 2) * B(2, 0)) +
                        B(0, 2) * (B(1, 0) * B(2, 1) - B(1, 1) * B(2, 0));
    const double r = std::clamp(detB / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    std::array<double, 3> out = {e3, 3.0 * q - e1 - e3, e1};
    std::sort(out.begin(), out.end());
    return out;
}

bool criterion_unbiasedness(std::ostream& os) {
    const RunArtifacts biased = run_preset("fig2a");
    const RunArtifacts a30 = run_preset("fig2b");
    const RunArtifacts a60 = run_preset("fig2b", 60.0);
    const double biased_floor = tail_sup_error(biased.report);
    os << "classical tail sup " << biased_floor << " (> 0.01), unbiased final "
       << a30.report.final_error << " (<= 0.05), at 60s " << a60.report.final_error
       << " (< 30s value)";
    return biased_floor > 0.01 && a30.report.final_error <= 0.05 &&
           a60.report.final_error < a30.report.final_error;
}

bool criterion_rate(std::ostream& os) {
    const RunArtifacts a30 = run_preset("fig2b");
    const RunArtifacts a60 = run_preset("fig2b", 60.0);
    os << "rate_sup 30s = " << a30.report.rate_sup << ", 60s = " << a60.report.rate_sup
       << " (tolerance factor 1.2)";
    return a60.report.rate_sup <= 1.2 * a30.report.rate_sup;
}

bool criterion_exponential(std::ostream& os) {
    const RunArtifacts art = run_preset("fig3b");
    os << "tail slope " << art.report.tail_fit.slope << " (in [-0.05, -0.015]), R^2 "
       << art.report.tail_fit.r_squared << " (>= 0.8)";
    return art.report.tail_fit.slope >= -0.05 && art.report.tail_fit.slope <= -0.015 &&
           art.report.tail_fit.r_squared >= 0.8;
}

bool criterion_prescribed(std::ostream& os) {
    const RunArtifacts art = run_preset("fig4c");
    const double at_clamp = error_near(art.report, 4.5);
    const double after = window_max_error(art.report, 4.5, 6.0);
    os << "error at 4.5 = " << at_clamp << " (<= 0.02), max on [4.5, 6] = " << after
       << " (<= 0.05)";
    return at_clamp <= 0.02 && after <= 0.05;
}

bool criterion_conservation(std::ostream& os) {
    bool ok = true;
    double worst_full = 0.0;
    for (const auto& name : preset_names()) {
        const RunArtifacts art = run_preset(name);
        worst_full = std::max(worst_full, art.report.invariant_drift);
        ok = ok && art.report.invariant_drift <= 1e-9;
    }

    // Averaged counterparts (constant-frequency form) on both cost families.
    double worst_avg = 0.0;
    for (const std::string name : {"fig2b", "cert5"}) {
        const Scenario sc = parse_scenario(load_config(name));
        const Eigen::MatrixXd Lx = kron_expand(laplacian(sc.graph).L, sc.cost.dim());
        const SwarmState a0 = to_averaged_coords(sc.init, sc.es, sc.cost);
        StepPolicy policy = sc.sim.policy;
        policy.record_stride = 10;
        const SwarmTrajectory traj = simulate(
            [&](const SwarmState& s) { return rhs_averaged(s, sc.es, sc.cost, Lx); }, a0,
            sc.sim.t_end, sc.es, policy);
        const double sum0 = traj.states.front().z.sum();
        for (const auto& st : traj.states) {
            worst_avg = std::max(worst_avg, std::abs(st.z.sum() - sum0));
        }
    }
    ok = ok && worst_avg <= 1e-9;
    os << "worst |sum z| drift: full " << worst_full << ", averaged " << worst_avg
       << " (<= 1e-9)";
    return ok;
}

bool criterion_averaging(std::ostream& os) {
    const Scenario sc = parse_scenario(load_config("fig2b"));
    const Eigen::MatrixXd Lx = kron_expand(laplacian(sc.graph).L, sc.cost.dim());
    const std::vector<double> gaps =
        averaging_gap(sc.es, sc.cost, Lx, sc.init, 30.0, {10.0, 40.0}, sc.sim.policy);
    os << "sup gap at omega 10 = " << gaps[0] << ", at omega 40 = " << gaps[1];
    return gaps[1] < gaps[0];
}

bool criterion_dilation(std::ostream& os) {
    const std::vector<GrowthFn> growths = {GrowthFn::asymptotic(1.0, 2.0),
                                           GrowthFn::exponential(0.03),
                                           GrowthFn::prescribed_time(5.0, 1.0)};
    double worst_tau = 0.0, worst_phi = 0.0;
    for (const auto& g : growths) {
        EsConfig es;
        es.growth = g;
        es.probing = Probing::Chirpy;
        es.q = 2;
        const double t_hi = g.kind == GrowthKind::PrescribedTime ? 4.0 : 20.0;
        for (int i = 0; i < 20; ++i) {
            const double t = t_hi * (i + 0.5) / 20.0;
            const double h = 1e-6;
            const double fd_tau = (chirp_tau(es, t + h) - chirp_tau(es, t - h)) / (2.0 * h);
            const double want_tau = std::pow(g.value(t), es.p() + 1.0);
            worst_tau = std::max(worst_tau, std::abs(fd_tau - want_tau) / want_tau);

            const double fd_phi = (g.value(t + h) - g.value(t - h)) / (2.0 * h);
            const double want_phi = std::pow(g.value(t), es.p() - es.q + 2.0) / (es.rho() * es.q);
            worst_phi = std::max(worst_phi, std::abs(fd_phi - want_phi) / want_phi);
        }
    }
    os << "worst relative mismatch: d(tau)/dt " << worst_tau << ", d(phi)/dt " << worst_phi
       << " (<= 1e-6)";
    return worst_tau <= 1e-6 && worst_phi <= 1e-6;
}

bool criterion_lmi(std::ostream& os) {
    bool ok = true;

    Eigen::Matrix2d A2;
    A2 << 2.0, 1.0, 1.0, 2.0;
    const SymEig e2 = sym_eig(A2);
    ok = ok && std::abs(e2.values(0) - 1.0) <= 1e-10 && std::abs(e2.values(1) - 3.0) <= 1e-10;

    std::mt19937 rng(101);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::Matrix3d A3;
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) A3(i, j) = A3(j, i) = dist(rng);
        }
        const SymEig e3 = sym_eig(A3);
        const auto oracle = charpoly_eigs3(A3);
        for (int i = 0; i < 3; ++i) {
            ok = ok && std::abs(e3.values(i) - oracle[static_cast<std::size_t>(i)]) <= 1e-10;
        }
    }

    // Hand-assembled N = 3 entries (scalar certificate for brevity).
    const LaplacianPair lp3 = laplacian(Digraph::ring(3));
    const double rr = 0.25, alpha = 1.2, k = 0.8, gamma = 1.1, m = 0.5, M = 2.5;
    const double p11 = 0.7, p22 = 1.3, s = 0.2, p3 = 1.0, delta = 0.9;
    const LmiCertificate cert3 = LmiCertificate::scalar(3, p11, p22, s, p3, delta);
    ConvexityBounds b3;
    b3.m_agent = Eigen::VectorXd::Constant(3, m);
    b3.M_agent = Eigen::VectorXd::Constant(3, M);
    const PhiPair phi = build_phi(lp3, b3, cert3, RateParams{rr, alpha, k, gamma});
    const Eigen::MatrixXd S = lp3.R.transpose() * lp3.L * lp3.R;
    const Eigen::MatrixXd St = S.transpose();
    const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd phi1_hand = Eigen::MatrixXd::Zero(5, 5);
    phi1_hand(0, 0) = 2 * rr * p11 - m * p11 * alpha * k + delta * M * M;
    phi1_hand.block(1, 1, 2, 2) = (2 * rr * p22 - m * p11 * alpha * k + delta * M * M) * I2;
    phi1_hand.block(1, 3, 2, 2) = rr * s * I2;
    phi1_hand.block(3, 1, 2, 2) = rr * s * I2;
    phi1_hand.block(3, 3, 2, 2) = -s * I2;
    Eigen::MatrixXd phi2_hand = Eigen::MatrixXd::Zero(6, 6);
    phi2_hand.block(0, 0, 2, 2) = (gamma * s - p22) * (S + St);
    phi2_hand.block(0, 2, 2, 2) = -p22 * I2 + (0.5 * gamma * p3 + 0.5 * alpha * s) * (S + St);
    phi2_hand.block(2, 0, 2, 2) = phi2_hand.block(0, 2, 2, 2).transpose();
    phi2_hand.block(0, 4, 2, 2) = 0.5 * (p22 - p11) * alpha * k * I2;
    phi2_hand.block(4, 0, 2, 2) = phi2_hand.block(0, 4, 2, 2);
    phi2_hand.block(2, 2, 2, 2) = -s * I2;
    phi2_hand.block(2, 4, 2, 2) = -0.5 * alpha * k * s * I2;
    phi2_hand.block(4, 2, 2, 2) = phi2_hand.block(2, 4, 2, 2);
    phi2_hand.block(4, 4, 2, 2) = -delta * I2;
    ok = ok && (phi.phi1 - phi1_hand).cwiseAbs().maxCoeff() <= 1e-12;
    ok = ok && (phi.phi2 - phi2_hand).cwiseAbs().maxCoeff() <= 1e-12;

    // Rejection of a non-PD P3 and acceptance of the frozen 5-ring fixture.
    const LaplacianPair lp5 = laplacian(Digraph::ring(5));
    ConvexityBounds b5;
    b5.m_agent = Eigen::VectorXd::Constant(5, 2.0);
    b5.M_agent = Eigen::VectorXd::Constant(5, 2.0);
    const RateParams rates{0.1, 1.0, 1.0, 1.0};
    LmiCertificate bad = LmiCertificate::scalar(5, 1.0, 1.0, 0.3, 1.0, 0.3);
    bad.P3 = -Eigen::MatrixXd::Identity(4, 4);
    ok = ok && !check_certificate(lp5, b5, bad, rates).feasible;

    const SearchResult found = search_certificate(lp5, b5, rates);
    ok = ok && found.certificate.has_value();
    if (found.certificate) {
        ok = ok && check_certificate(lp5, b5, *found.certificate, rates).feasible;
    }
    os << "eigen fixtures, hand-assembled blocks, non-PD rejection, frozen fixture "
       << (found.certificate ? "found" : "MISSING");
    return ok;
}

bool criterion_oracles(std::ostream& os) {
    bool ok = true;
    const CostModel stat = CostModel::quad_sin_sq(5, 1, Eigen::VectorXd::LinSpaced(5, 1, 5));
    Eigen::VectorXd a(5), b(5);
    a << 0.1, 0.3, 0.5, 0.4, 0.5;
    b << 0.1, 0.2, 0.3, 0.1, 0.4;
    const CostModel vary = CostModel::shifted_quadratic(5, 1, a, b);

    std::mt19937 rng(202);
    std::uniform_real_distribution<double> xd(-4.0, 8.0), td(0.0, 30.0);
    double worst = 0.0;
    for (const CostModel* c : {&stat, &vary}) {
        for (int probe = 0; probe < 20; ++probe) {
            const int agent = probe % 5;
            const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, xd(rng));
            const double t = td(rng);
            const double h = 1e-5;
            Eigen::VectorXd xp = x, xm = x;
            xp(0) += h;
            xm(0) -= h;
            const double fd = (c->value(agent, xp, t) - c->value(agent, xm, t)) / (2 * h);
            const double an = c->grad(agent, x, t)(0);
            worst = std::max(worst, std::abs(an - fd) / std::max(1.0, std::abs(an)));
        }
    }
    ok = ok && worst <= 1e-6;

    const double xs = stat.optimum(3.0)(0);
    ok = ok && std::abs(xs - 3.0) <= 1e-9;

    double worst_mean = 0.0;
    for (double t : {0.0, 2.5, 17.0}) {
        double mean = 0.0;
        for (int i = 0; i < 5; ++i) mean += a(i) * std::sin(b(i) * t);
        mean /= 5.0;
        worst_mean = std::max(worst_mean, std::abs(vary.optimum(t)(0) - mean));
    }
    ok = ok && worst_mean <= 1e-10;
    os << "grad-vs-FD worst " << worst << " (<= 1e-6), static optimum |x*-3| = "
       << std::abs(xs - 3.0) << " (<= 1e-9), moving optimum off by " << worst_mean
       << " (<= 1e-10)";
    return ok;
}

bool criterion_integrator(std::ostream& os) {
    auto endpoint_error = [](double h) {
        StepPolicy policy;
        policy.h_max = h;
        policy.record_stride = 1 << 20;
        const auto traj = integrate_rk4([](double, double x) { return -x; }, 1.0, 0.0, 1.0,
                                        policy, [&](double) { return h; });
        return std::abs(traj.back() - std::exp(-1.0));
    };
    const double ratio = endpoint_error(0.05) / endpoint_error(0.025);

    const Eigen::MatrixXd L = laplacian(Digraph::ring(5)).L;
    Eigen::VectorXd z0(5);
    z0 << 1.0, -2.0, 0.5, 3.0, -0.25;
    StepPolicy policy;
    policy.h_max = 1e-3;
    policy.record_stride = 1000000;
    const auto traj = integrate_rk4(
        [&](double, const Eigen::VectorXd& z) { return Eigen::VectorXd(-L * z); }, z0, 0.0,
        1000.0, policy, [&](double) { return 1e-3; });
    const double drift = std::abs(traj.back().sum() - z0.sum());
    os << "halving ratio " << ratio << " (in [12, 20]), invariant drift " << drift
       << " over 1e6 steps (<= 1e-12)";
    return ratio >= 12.0 && ratio <= 20.0 && drift <= 1e-12;
}

bool criterion_purity(std::ostream& os) {
    // Measurement-only contract: both algorithms run against a cost model
    // that has no gradient oracle at all.
    const CostModel c = CostModel::custom(
        5, 1, [](int agent, const Eigen::VectorXd& x, double t) {
            const double u = x(0) - agent - 0.1 * std::sin(0.2 * t);
            return u * u + 0.3 * std::abs(std::sin(u));
        });
    const Eigen::MatrixXd Lx = kron_expand(laplacian(Digraph::ring(5)).L, 1);
    SwarmState s0;
    s0.x = Eigen::VectorXd::Zero(5);
    s0.eta = Eigen::VectorXd::Zero(5);
    s0.z = Eigen::VectorXd::Zero(5);

    EsConfig cf;
    cf.growth = GrowthFn::asymptotic(1.0, 2.0);
    cf.probing = Probing::ConstantFrequency;
    StepPolicy policy;
    policy.record_stride = 100;
    const SwarmTrajectory t1 = simulate(
        [&](const SwarmState& s) { return rhs_constant_freq(s, cf, c, Lx); }, s0, 5.0, cf,
        policy);

    EsConfig ch = cf;
    ch.growth = GrowthFn::exponential(0.03);
    ch.probing = Probing::Chirpy;
    ch.q = 2;
    const SwarmTrajectory t2 = simulate(
        [&](const SwarmState& s) { return rhs_chirpy(s, ch, c, Lx); }, s0, 5.0, ch, policy);

    const bool ok = t1.back().x.allFinite() && t2.back().x.allFinite();
    os << "constant-frequency and chirpy runs completed on a gradient-free cost ("
       << t1.size() << " / " << t2.size() << " samples)";
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"unbiasedness vs classical probing", criterion_unbiasedness},
        {"growth-scaled rate statistic", criterion_rate},
        {"exponential convergence slope", criterion_exponential},
        {"prescribed-time tracking with clamped gain", criterion_prescribed},
        {"invariant-set conservation (full + averaged)", criterion_conservation},
        {"averaging agreement improves with frequency", criterion_averaging},
        {"time-dilation and growth-rate identities", criterion_dilation},
        {"certificate machinery fixtures", criterion_lmi},
        {"oracle consistency", criterion_oracles},
        {"integrator order and linear invariants", criterion_integrator},
        {"measurement-only algorithm contract", criterion_purity},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::ostringstream note;
        bool ok = false;
        try {
            ok = criteria[i].run(note);
        } catch (const std::exception& e) {
            note << "exception: " << e.what();
        }
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << (i + 1) << ": "
                  << criteria[i].name << " - " << note.str() << "\n";
        if (!ok) ++failures;
    }
    if (failures == 0) {
        std::cout << "all criteria passed\n";
    } else {
        std::cout << failures << " criteria failed\n";
    }
    return failures == 0 ? 0 : 1;
}
