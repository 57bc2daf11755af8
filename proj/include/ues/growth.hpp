#pragma once

// Gain growth functions. All kinds are normalized to phi(t0) = 1 and grow
// strictly until the optional clamp time, after which phi is held at its
// clamp value so gains and probing frequencies stop increasing.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace ues {

enum class GrowthKind { Classical, Asymptotic, Exponential, PrescribedTime };

struct GrowthFn {
    GrowthKind kind = GrowthKind::Classical;
    double beta = 0.0;    // Asymptotic
    double v = 2.0;       // Asymptotic
    double lambda = 0.0;  // Exponential
    double T = 0.0;       // PrescribedTime horizon
    double varrho = 1.0;  // PrescribedTime exponent
    double t0 = 0.0;
    std::optional<double> clamp_time;

    static GrowthFn classical(double t0 = 0.0) {
        GrowthFn g;
        g.kind = GrowthKind::Classical;
        g.t0 = t0;
        return g;
    }
    static GrowthFn asymptotic(double beta, double v, double t0 = 0.0) {
        GrowthFn g;
        g.kind = GrowthKind::Asymptotic;
        g.beta = beta;
        g.v = v;
        g.t0 = t0;
        return g;
    }
    static GrowthFn exponential(double lambda, double t0 = 0.0) {
        GrowthFn g;
        g.kind = GrowthKind::Exponential;
        g.lambda = lambda;
        g.t0 = t0;
        return g;
    }
    static GrowthFn prescribed_time(double T, double varrho, double t0 = 0.0) {
        GrowthFn g;
        g.kind = GrowthKind::PrescribedTime;
        g.T = T;
        g.varrho = varrho;
        g.t0 = t0;
        return g;
    }

    void validate() const {
        switch (kind) {
            case GrowthKind::Classical:
                break;
            case GrowthKind::Asymptotic:
                if (!(beta > 0.0) || !(v > 0.0)) {
                    throw std::invalid_argument("GrowthFn: asymptotic needs beta > 0, v > 0");
                }
                break;
            case GrowthKind::Exponential:
                if (!(lambda > 0.0)) {
                    throw std::invalid_argument("GrowthFn: exponential needs lambda > 0");
                }
                break;
            case GrowthKind::PrescribedTime:
                if (!(T > 0.0) || !(varrho > 0.0)) {
                    throw std::invalid_argument(
                        "GrowthFn: prescribed-time needs T > 0, varrho > 0");
                }
                break;
        }
        if (clamp_time && !(*clamp_time > t0)) {
            throw std::invalid_argument("GrowthFn: clamp_time must exceed t0");
        }
    }

    /// phi(t); frozen at phi(clamp_time) beyond the clamp.
    [[nodiscard]] double value(double t) const {
        if (clamp_time && t > *clamp_time) t = *clamp_time;
        const double dt = t - t0;
        switch (kind) {
            case GrowthKind::Classical:
                return 1.0;
            case GrowthKind::Asymptotic:
                return std::pow(1.0 + beta * dt, 1.0 / v);
            case GrowthKind::Exponential:
                return std::exp(lambda * dt);
            case GrowthKind::PrescribedTime: {
                const double rem = T - dt;
                if (rem <= 0.0) {
                    throw std::domain_error(
                        "GrowthFn: prescribed-time gain is singular at t >= t0 + T "
                        "(set clamp_time)");
                }
                return std::pow(T / rem, 1.0 / varrho);
            }
        }
        throw std::logic_error("GrowthFn: unreachable");
    }

    /// d/dt log phi(t); zero for the classical kind and past the clamp.
    [[nodiscard]] double log_derivative(double t) const {
        if (clamp_time && t > *clamp_time) return 0.0;
        const double dt = t - t0;
        switch (kind) {
            case GrowthKind::Classical:
                return 0.0;
            case GrowthKind::Asymptotic:
                return (beta / v) / (1.0 + beta * dt);
            case GrowthKind::Exponential:
                return lambda;
            case GrowthKind::PrescribedTime: {
                const double rem = T - dt;
                if (rem <= 0.0) {
                    throw std::domain_error("GrowthFn: prescribed-time gain is singular");
                }
                return 1.0 / (varrho * rem);
            }
        }
        throw std::logic_error("GrowthFn: unreachable");
    }

    /// Rate coefficient entering the certificate: beta/v for the asymptotic
    /// kind, and 1/(q rho) = lambda resp. 1/(varrho T) for the chirpy kinds.
    [[nodiscard]] double lmi_rate_ratio() const {
        switch (kind) {
            case GrowthKind::Classical:
                return 0.0;
            case GrowthKind::Asymptotic:
                return beta / v;
            case GrowthKind::Exponential:
                return lambda;
            case GrowthKind::PrescribedTime:
                return 1.0 / (varrho * T);
        }
        throw std::logic_error("GrowthFn: unreachable");
    }

    [[nodiscard]] std::string kind_name() const {
        switch (kind) {
            case GrowthKind::Classical: return "classical";
            case GrowthKind::Asymptotic: return "asymptotic";
            case GrowthKind::Exponential: return "exponential";
            case GrowthKind::PrescribedTime: return "prescribed";
        }
        return "?";
    }
};

inline double growth_value(const GrowthFn& g, double t) { return g.value(t); }

}  // namespace ues
