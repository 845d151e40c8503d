#pragma once

#include <numbers>
#include <stdexcept>

namespace sphlab {

enum class KernelKind { wendland_c6 };

/// 3-D Wendland C6 kernel with compact support radius h.
struct WendlandC6
{
    static constexpr KernelKind kind = KernelKind::wendland_c6;
    static constexpr double normalization = 1365.0 / (64.0 * std::numbers::pi);

    /// Dimensionless shape (1-q)^8 (1 + 8q + 25q^2 + 32q^3); caller guarantees 0 <= q < 1.
    static constexpr double shape(double q) noexcept
    {
        const double t = 1.0 - q;
        const double t2 = t * t;
        const double t4 = t2 * t2;
        return t4 * t4 * (1.0 + q * (8.0 + q * (25.0 + q * 32.0)));
    }

    /// Weight for a neighbour known to lie inside the support (r < h).
    static constexpr double weight_in_support(double r, double inv_h) noexcept
    {
        const double inv_h3 = inv_h * inv_h * inv_h;
        return normalization * inv_h3 * shape(r * inv_h);
    }

    /// Support test lives inside the function: zero weight outside instead of a
    /// branch around the call site.
    static constexpr double weight_lowered(double r, double h, double inv_h) noexcept
    {
        return r < h ? weight_in_support(r, inv_h) : 0.0;
    }
};

class KernelError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

inline double kernel_w(double r, double h)
{
    if (!(h > 0.0))
        throw KernelError("kernel_w: smoothing length must be positive");
    return WendlandC6::weight_lowered(r, h, 1.0 / h);
}

}  // namespace sphlab
