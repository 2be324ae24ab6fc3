#include "stfilm/mobility.hpp"

#include <cmath>
#include <string>

#include "stfilm/errors.hpp"

namespace stfilm {

MobilityModel MobilityModel::make(double epsilon, double theta) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw SimError("MobilityModel: epsilon must be >= 0, got " + std::to_string(epsilon));
    if (!(theta > 0.0) || !(theta < 0.4))
        throw SimError("MobilityModel: theta must lie strictly inside (0, 0.4), got " +
                       std::to_string(theta));
    return MobilityModel{epsilon, theta};
}

namespace {
void require_nonneg(double s, const char* op) {
    if (s < 0.0 || !std::isfinite(s))
        throw NegativeHeight(std::string(op) + ": height must be >= 0, got " + std::to_string(s));
}
void require_pos(double s, const char* op) {
    if (!(s > 0.0) || !std::isfinite(s))
        throw NonPositiveHeight(std::string(op) + ": height must be > 0, got " + std::to_string(s));
}
void require_eps_entropy(const MobilityModel& m, const char* op) {
    if (m.epsilon == 0.0)
        throw LimitMobilityHasNoEpsilonEntropy(std::string(op) +
                                               ": entropy is defined only for epsilon > 0");
}
} // namespace

double f_eps(const MobilityModel& m, double s) {
    require_nonneg(s, "f_eps");
    if (m.epsilon == 0.0) return s * s;
    const double s2 = s * s;
    return s2 * s2 / (m.epsilon + s2);
}

double f_eps_prime(const MobilityModel& m, double s) {
    require_nonneg(s, "f_eps_prime");
    if (m.epsilon == 0.0) return 2.0 * s;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double d = m.epsilon + s2;
    return (2.0 * s3 * s2 + 4.0 * m.epsilon * s3) / (d * d);
}

double entropy_G(const MobilityModel& m, double s) {
    require_eps_entropy(m, "entropy_G");
    require_pos(s, "entropy_G");
    return m.epsilon / (6.0 * s * s) - std::log(s);
}

double entropy_G_prime(const MobilityModel& m, double s) {
    require_eps_entropy(m, "entropy_G_prime");
    require_pos(s, "entropy_G_prime");
    return -m.epsilon / (3.0 * s * s * s) - 1.0 / s;
}

double entropy_G_second(const MobilityModel& m, double s) {
    require_eps_entropy(m, "entropy_G_second");
    require_pos(s, "entropy_G_second");
    const double s2 = s * s;
    return (m.epsilon + s2) / (s2 * s2);
}

Field lift_initial(const MobilityModel& m, const Field& u0) {
    if (m.epsilon == 0.0) throw SimError("lift_initial: the limit model (epsilon = 0) has no lift");
    for (double a : u0.v)
        if (a < 0.0 || !std::isfinite(a))
            throw NegativeInitialData("lift_initial: initial data must be >= 0, found " +
                                      std::to_string(a));
    const double lift = std::pow(m.epsilon, m.theta);
    Field out = u0;
    for (double& a : out.v) a += lift;
    return ensure_finite(out, "lift_initial");
}

double entropy_functional(const MobilityModel& m, const Field& f) {
    require_eps_entropy(m, "entropy_functional");
    double s = 0.0;
    for (double a : f.v) {
        require_pos(a, "entropy_functional");
        s += m.epsilon / (6.0 * a * a) - std::log(a);
    }
    return f.grid->h * s;
}

} // namespace stfilm
