#include "fcc/rng.hpp"

#include <cmath>

#include "fcc/errors.hpp"

namespace fcc {

namespace {

inline double poly7(const double c[8], double r) {
    return ((((((c[7] * r + c[6]) * r + c[5]) * r + c[4]) * r + c[3]) * r +
             c[2]) * r + c[1]) * r + c[0];
}

// Wichura's PPND16 coefficient blocks: central rational approximation on
// |u - 1/2| <= 0.425, two tail approximations in sqrt(-log) scale.
constexpr double kCentralNum[8] = {
    3.3871328727963666080e+0, 1.3314166789178437745e+2,
    1.9715909503065514427e+3, 1.3731693765509461125e+4,
    4.5921953931549871457e+4, 6.7265770927008700853e+4,
    3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kCentralDen[8] = {
    1.0,                      4.2313330701600911252e+1,
    6.8718700749205790830e+2, 5.3941960214247511077e+3,
    2.1213794301586595867e+4, 3.9307895800092710610e+4,
    2.8729085735721942674e+4, 5.2264952788528545610e+3};
constexpr double kMidNum[8] = {
    1.42343711074968357734e+0, 4.63033784615654529590e+0,
    5.76949722146069140550e+0, 3.64784832476320460504e+0,
    1.27045825245236838258e+0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kMidDen[8] = {
    1.0,                       2.05319162663775882187e+0,
    1.67638483018380384940e+0, 6.89767334985100004550e-1,
    1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr double kFarNum[8] = {
    6.65790464350110377720e+0, 5.46378491116411436990e+0,
    1.78482653991729133580e+0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kFarDen[8] = {
    1.0,                       5.99832206555887937690e-1,
    1.36929880922735805310e-1, 1.48753612908506148525e-2,
    7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15};

}  // namespace

double inv_normal_cdf(double u) {
    if (!(u > 0.0) || !(u < 1.0)) {
        throw invalid_input_error(
            "inv_normal_cdf: argument must lie strictly inside (0, 1)");
    }
    const double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly7(kCentralNum, r) / poly7(kCentralDen, r);
    }
    double r = (q < 0.0) ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = poly7(kMidNum, r) / poly7(kMidDen, r);
    } else {
        r -= 5.0;
        x = poly7(kFarNum, r) / poly7(kFarDen, r);
    }
    return (q < 0.0) ? -x : x;
}

double Rng::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw invalid_input_error("exponential: rate must be positive");
    }
    return -std::log(uniform01()) / rate;
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) {
        throw invalid_input_error("gamma: shape must be positive");
    }
    if (shape < 1.0) {
        // Boost: if G ~ Gamma(shape + 1) and U uniform, G * U^(1/shape) has
        // the Gamma(shape) law.
        const double u = uniform01();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) throw invalid_input_error("uniform_index: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

}  // namespace fcc
