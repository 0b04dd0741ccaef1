#include "evrep/aplof.hpp"

#include <array>
#include <cmath>

namespace evrep {

std::size_t ActivePixelMask::count() const {
    std::size_t n = 0;
    for (const std::uint8_t a : active) {
        n += a;
    }
    return n;
}

ActivePixelMask apm_high(const DenseTensor& labits_layer, double beta) {
    if (labits_layer.channels() != 1) {
        throw DimMismatch("apm_high expects a single-channel layer");
    }
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw BadThreshold("beta must be in (0, 1]");
    }
    ActivePixelMask mask(labits_layer.height(), labits_layer.width(),
                         ActivePixelMask::Resolution::high);
    for (std::size_t y = 0; y < mask.height; ++y) {
        for (std::size_t x = 0; x < mask.width; ++x) {
            mask.set(y, x, std::abs(static_cast<double>(labits_layer.at(0, y, x))) < beta);
        }
    }
    return mask;
}

ActivePixelMask apm_low(const ActivePixelMask& hr_mask, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw BadThreshold("gamma must be in (0, 1)");
    }
    const std::size_t lr_height = (hr_mask.height + 7) / 8;
    const std::size_t lr_width = (hr_mask.width + 7) / 8;
    ActivePixelMask mask(lr_height, lr_width, ActivePixelMask::Resolution::low);
    for (std::size_t by = 0; by < lr_height; ++by) {
        for (std::size_t bx = 0; bx < lr_width; ++bx) {
            std::size_t active = 0;
            std::size_t total = 0;
            for (std::size_t y = by * 8; y < std::min(hr_mask.height, by * 8 + 8); ++y) {
                for (std::size_t x = bx * 8; x < std::min(hr_mask.width, bx * 8 + 8); ++x) {
                    active += hr_mask.at(y, x) ? 1 : 0;
                    ++total;
                }
            }
            const double fraction = static_cast<double>(active) / static_cast<double>(total);
            mask.set(by, bx, fraction >= gamma);
        }
    }
    return mask;
}

FlowField aplof_ground_truth(const FlowField& flow_minus, const FlowField& flow_plus,
                             const FlowField& flow_tau, const ActivePixelMask& hr_mask) {
    if (!flow_minus.same_dims(flow_plus) || !flow_minus.same_dims(flow_tau)
        || hr_mask.height != flow_minus.height() || hr_mask.width != flow_minus.width()) {
        throw DimMismatch("aplof ground truth inputs differ in size");
    }
    const std::size_t height = flow_minus.height();
    const std::size_t width = flow_minus.width();
    std::vector<double> sum_u(height * width, 0.0);
    std::vector<double> sum_v(height * width, 0.0);
    std::vector<std::uint32_t> hits(height * width, 0);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            if (!hr_mask.at(y, x) || !flow_minus.valid(y, x) || !flow_plus.valid(y, x)
                || !flow_tau.valid(y, x)) {
                continue;
            }
            const long tx = static_cast<long>(x) + std::lround(flow_tau.u(y, x));
            const long ty = static_cast<long>(y) + std::lround(flow_tau.v(y, x));
            if (tx < 0 || ty < 0 || tx >= static_cast<long>(width)
                || ty >= static_cast<long>(height)) {
                continue;
            }
            const std::size_t target = static_cast<std::size_t>(ty) * width + tx;
            sum_u[target] += static_cast<double>(flow_plus.u(y, x)) - flow_minus.u(y, x);
            sum_v[target] += static_cast<double>(flow_plus.v(y, x)) - flow_minus.v(y, x);
            ++hits[target];
        }
    }
    FlowField out(height, width);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t px = y * width + x;
            if (hits[px] > 0) {
                out.set(y, x, static_cast<float>(sum_u[px] / hits[px]),
                        static_cast<float>(sum_v[px] / hits[px]));
            }
        }
    }
    return out;
}

namespace {

/// 3x3 linear solve, Gaussian elimination with partial pivoting.
/// Returns false when the system is (numerically) singular.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
            std::array<double, 3>& out) {
    std::array<int, 3> perm = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(m[perm[row]][col]) > std::abs(m[perm[pivot]][col])) {
                pivot = row;
            }
        }
        std::swap(perm[col], perm[pivot]);
        const double diag = m[perm[col]][col];
        if (std::abs(diag) < 1e-12) {
            return false;
        }
        for (int row = col + 1; row < 3; ++row) {
            const double factor = m[perm[row]][col] / diag;
            for (int k = col; k < 3; ++k) {
                m[perm[row]][k] -= factor * m[perm[col]][k];
            }
            rhs[perm[row]] -= factor * rhs[perm[col]];
        }
    }
    for (int col = 2; col >= 0; --col) {
        double acc = rhs[perm[col]];
        for (int k = col + 1; k < 3; ++k) {
            acc -= m[perm[col]][k] * out[k];
        }
        out[col] = acc / m[perm[col]][col];
    }
    return true;
}

}  // namespace

FlowField aplof_from_labits(const DenseTensor& labits_layer, double tau_range_s, double beta,
                            int patch, int min_support) {
    if (patch < 3 || patch % 2 == 0) {
        throw BadConfig("patch must be an odd integer >= 3");
    }
    if (min_support < 3) {
        throw BadConfig("min_support must be >= 3");
    }
    if (!(tau_range_s > 0.0)) {
        throw BadConfig("tau_range must be positive");
    }
    const ActivePixelMask mask = apm_high(labits_layer, beta);
    const std::size_t height = labits_layer.height();
    const std::size_t width = labits_layer.width();
    const int radius = patch / 2;
    FlowField out(height, width);

    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            if (!mask.at(y, x)) {
                continue;
            }
            // accumulate plane-fit moments over active pixels, patch-centered coords
            double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, s1 = 0;
            double svx = 0, svy = 0, sv = 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                const long ny = static_cast<long>(y) + dy;
                if (ny < 0 || ny >= static_cast<long>(height)) {
                    continue;
                }
                for (int dx = -radius; dx <= radius; ++dx) {
                    const long nx = static_cast<long>(x) + dx;
                    if (nx < 0 || nx >= static_cast<long>(width) || !mask.at(ny, nx)) {
                        continue;
                    }
                    const double value = labits_layer.at(0, ny, nx);
                    sxx += dx * dx;
                    sxy += dx * dy;
                    syy += dy * dy;
                    sx += dx;
                    sy += dy;
                    s1 += 1;
                    svx += value * dx;
                    svy += value * dy;
                    sv += value;
                }
            }
            if (s1 < min_support) {
                continue;
            }
            std::array<double, 3> plane;
            if (!solve3({{{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, s1}}}, {svx, svy, sv}, plane)) {
                continue;
            }
            const double grad_sq = plane[0] * plane[0] + plane[1] * plane[1];
            if (grad_sq < 1e-6 * 1e-6) {
                continue;
            }
            out.set(y, x, static_cast<float>(plane[0] / (grad_sq * tau_range_s)),
                    static_cast<float>(plane[1] / (grad_sq * tau_range_s)));
        }
    }
    return out;
}

double aplof_loss(const AplofPair& pred, const AplofPair& gt) {
    return mean_l1(pred.hr, gt.hr) + mean_l1(pred.lr, gt.lr);
}

double backward_difference(const std::function<double(double)>& f, double t, double dt) {
    return (f(t) - f(t - dt)) / dt;
}

double central_difference(const std::function<double(double)>& f, double t, double dt) {
    return (f(t + dt) - f(t - dt)) / (2.0 * dt);
}

}  // namespace evrep
