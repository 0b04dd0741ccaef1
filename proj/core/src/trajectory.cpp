#include "evrep/trajectory.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace evrep {

BezierTrajectoryField::BezierTrajectoryField(std::size_t height, std::size_t width,
                                             std::size_t degree, std::uint64_t t_reference,
                                             std::uint64_t t_target)
    : height_(height),
      width_(width),
      degree_(degree),
      t_reference_(t_reference),
      t_target_(t_target),
      points_(height * width * degree * 2, 0.0f) {
    if (degree_ < 1) {
        throw BadConfig("bezier degree must be >= 1");
    }
    if (t_target_ <= t_reference_) {
        throw DegenerateWindow("bezier trajectory needs t_target > t_reference");
    }
}

Vec2 BezierTrajectoryField::control_point(std::size_t y, std::size_t x, std::size_t i) const {
    const std::size_t base = ((y * width_ + x) * degree_ + (i - 1)) * 2;
    return {points_[base], points_[base + 1]};
}

void BezierTrajectoryField::set_control_point(std::size_t y, std::size_t x, std::size_t i,
                                              Vec2 value) {
    const std::size_t base = ((y * width_ + x) * degree_ + (i - 1)) * 2;
    points_[base] = static_cast<float>(value.x);
    points_[base + 1] = static_cast<float>(value.y);
}

namespace {

void validate_ground_truth(const TrajectoryGroundTruth& gt) {
    if (gt.times.empty() || gt.times.size() != gt.flows.size()) {
        throw BadConfig("ground truth needs one flow per evaluation time, at least one");
    }
    for (std::size_t k = 0; k < gt.times.size(); ++k) {
        if (gt.times[k] < 0.0 || gt.times[k] > 1.0) {
            throw TauOutOfRange("evaluation times must lie in [0, 1]");
        }
        if (k > 0 && gt.times[k] <= gt.times[k - 1]) {
            throw BadConfig("evaluation times must be strictly increasing");
        }
        if (!gt.flows[k].same_dims(gt.flows[0])) {
            throw DimMismatch("ground truth flows differ in size");
        }
    }
}

Vec2 de_casteljau(std::vector<Vec2>& points, double tau) {
    for (std::size_t level = points.size() - 1; level > 0; --level) {
        for (std::size_t i = 0; i < level; ++i) {
            points[i] = (1.0 - tau) * points[i] + tau * points[i + 1];
        }
    }
    return points[0];
}

double mean_l1_against(const FlowField& gt_flow, const FlowField& eval) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t y = 0; y < gt_flow.height(); ++y) {
        for (std::size_t x = 0; x < gt_flow.width(); ++x) {
            if (!gt_flow.valid(y, x)) {
                continue;
            }
            sum += std::abs(static_cast<double>(gt_flow.u(y, x)) - eval.u(y, x))
                 + std::abs(static_cast<double>(gt_flow.v(y, x)) - eval.v(y, x));
            ++n;
        }
    }
    if (n == 0) {
        throw NoValidPixels("ground truth flow has no valid pixels");
    }
    return sum / static_cast<double>(n);
}

}  // namespace

FlowField bezier_eval(const BezierTrajectoryField& field, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw TauOutOfRange("tau must lie in [0, 1]");
    }
    FlowField out(field.height(), field.width());
    std::vector<Vec2> points(field.degree() + 1);
    for (std::size_t y = 0; y < field.height(); ++y) {
        for (std::size_t x = 0; x < field.width(); ++x) {
            points[0] = {0.0, 0.0};
            for (std::size_t i = 1; i <= field.degree(); ++i) {
                points[i] = field.control_point(y, x, i);
            }
            const Vec2 d = de_casteljau(points, tau);
            out.set(y, x, static_cast<float>(d.x), static_cast<float>(d.y));
        }
    }
    return out;
}

double trajectory_loss(std::span<const BezierTrajectoryField> iterates,
                       const TrajectoryGroundTruth& gt, double gamma) {
    if (iterates.empty()) {
        throw EmptyIterates("trajectory loss needs at least one iterate");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw BadConfig("gamma must be in (0, 1]");
    }
    validate_ground_truth(gt);
    for (const BezierTrajectoryField& field : iterates) {
        if (field.height() != gt.flows[0].height() || field.width() != gt.flows[0].width()) {
            throw DimMismatch("iterate size does not match ground truth");
        }
    }
    const std::size_t n_iterates = iterates.size();
    double loss = 0.0;
    for (std::size_t i = 1; i <= n_iterates; ++i) {
        const double weight = std::pow(gamma, static_cast<double>(n_iterates - i));
        double iterate_term = 0.0;
        for (std::size_t k = 0; k < gt.times.size(); ++k) {
            iterate_term += mean_l1_against(gt.flows[k], bezier_eval(iterates[i - 1], gt.times[k]));
        }
        loss += weight * iterate_term;
    }
    return loss / static_cast<double>(gt.times.size());
}

TwoViewMetrics two_view_metrics(const FlowField& pred_endpoint, const FlowField& gt_endpoint) {
    if (!pred_endpoint.same_dims(gt_endpoint)) {
        throw DimMismatch("flow fields differ in size");
    }
    double epe_sum = 0.0;
    double ae_sum = 0.0;
    std::size_t n = 0;
    for (std::size_t y = 0; y < gt_endpoint.height(); ++y) {
        for (std::size_t x = 0; x < gt_endpoint.width(); ++x) {
            if (!pred_endpoint.valid(y, x) || !gt_endpoint.valid(y, x)) {
                continue;
            }
            const double u1 = pred_endpoint.u(y, x);
            const double v1 = pred_endpoint.v(y, x);
            const double u2 = gt_endpoint.u(y, x);
            const double v2 = gt_endpoint.v(y, x);
            epe_sum += std::hypot(u1 - u2, v1 - v2);
            const double cosine = (u1 * u2 + v1 * v2 + 1.0)
                                / (std::sqrt(u1 * u1 + v1 * v1 + 1.0)
                                   * std::sqrt(u2 * u2 + v2 * v2 + 1.0));
            ae_sum += std::acos(std::clamp(cosine, -1.0, 1.0));
            ++n;
        }
    }
    if (n == 0) {
        throw NoValidPixels("no jointly valid pixels");
    }
    return {epe_sum / static_cast<double>(n),
            ae_sum / static_cast<double>(n) * 180.0 / std::numbers::pi};
}

TrajectoryMetrics trajectory_metrics(const BezierTrajectoryField& pred,
                                     const TrajectoryGroundTruth& gt) {
    validate_ground_truth(gt);
    double tepe = 0.0;
    double tae = 0.0;
    for (std::size_t k = 0; k < gt.times.size(); ++k) {
        const TwoViewMetrics m = two_view_metrics(bezier_eval(pred, gt.times[k]), gt.flows[k]);
        tepe += m.epe;
        tae += m.ae_degrees;
    }
    const double n = static_cast<double>(gt.times.size());
    return {tepe / n, tae / n};
}

namespace {

double bernstein(std::size_t n, std::size_t i, double tau) {
    // binomial via running product; n stays small (degree <= ~10 in practice)
    double binom = 1.0;
    for (std::size_t j = 1; j <= i; ++j) {
        binom *= static_cast<double>(n - i + j) / static_cast<double>(j);
    }
    return binom * std::pow(1.0 - tau, static_cast<double>(n - i))
         * std::pow(tau, static_cast<double>(i));
}

/// Dense LU with partial pivoting for the small normal-equation systems.
class LuSolver {
public:
    explicit LuSolver(std::vector<double> matrix, std::size_t n) : m_(std::move(matrix)), n_(n) {
        perm_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            perm_[i] = i;
        }
        for (std::size_t col = 0; col < n_; ++col) {
            std::size_t pivot = col;
            for (std::size_t row = col + 1; row < n_; ++row) {
                if (std::abs(at(row, col)) > std::abs(at(pivot, col))) {
                    pivot = row;
                }
            }
            std::swap(perm_[col], perm_[pivot]);
            const double diag = at(col, col);
            if (std::abs(diag) < 1e-12) {
                throw Underdetermined("normal equations are singular");
            }
            for (std::size_t row = col + 1; row < n_; ++row) {
                const double factor = at(row, col) / diag;
                at(row, col) = factor;
                for (std::size_t k = col + 1; k < n_; ++k) {
                    at(row, k) -= factor * at(col, k);
                }
            }
        }
    }

    void solve(std::vector<double>& rhs) const {
        std::vector<double> b(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            b[i] = rhs[perm_[i]];
        }
        for (std::size_t i = 1; i < n_; ++i) {
            for (std::size_t k = 0; k < i; ++k) {
                b[i] -= at(i, k) * b[k];
            }
        }
        for (std::size_t i = n_; i-- > 0;) {
            for (std::size_t k = i + 1; k < n_; ++k) {
                b[i] -= at(i, k) * b[k];
            }
            b[i] /= at(i, i);
        }
        rhs = std::move(b);
    }

private:
    double& at(std::size_t row, std::size_t col) { return m_[perm_[row] * n_ + col]; }
    [[nodiscard]] double at(std::size_t row, std::size_t col) const {
        return m_[perm_[row] * n_ + col];
    }

    std::vector<double> m_;
    std::size_t n_;
    std::vector<std::size_t> perm_;
};

}  // namespace

BezierTrajectoryField fit_bezier(const TrajectoryGroundTruth& gt, std::size_t degree,
                                 std::uint64_t t_reference, std::uint64_t t_target) {
    validate_ground_truth(gt);
    if (degree < 1) {
        throw BadConfig("bezier degree must be >= 1");
    }
    const std::size_t n_times = gt.times.size();
    if (n_times < degree) {
        throw Underdetermined("need at least `degree` evaluation times");
    }
    const std::size_t height = gt.flows[0].height();
    const std::size_t width = gt.flows[0].width();

    // The Bernstein design matrix depends only on the times; factor once.
    std::vector<double> design(n_times * degree);
    for (std::size_t k = 0; k < n_times; ++k) {
        for (std::size_t i = 1; i <= degree; ++i) {
            design[k * degree + (i - 1)] = bernstein(degree, i, gt.times[k]);
        }
    }
    std::vector<double> normal(degree * degree, 0.0);
    for (std::size_t i = 0; i < degree; ++i) {
        for (std::size_t j = 0; j < degree; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n_times; ++k) {
                acc += design[k * degree + i] * design[k * degree + j];
            }
            normal[i * degree + j] = acc;
        }
    }
    const LuSolver solver(std::move(normal), degree);

    BezierTrajectoryField field(height, width, degree, t_reference, t_target);
    std::vector<double> rhs_u(degree);
    std::vector<double> rhs_v(degree);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            bool full = true;
            for (const FlowField& flow : gt.flows) {
                if (!flow.valid(y, x)) {
                    full = false;
                    break;
                }
            }
            if (!full) {
                continue;
            }
            std::fill(rhs_u.begin(), rhs_u.end(), 0.0);
            std::fill(rhs_v.begin(), rhs_v.end(), 0.0);
            for (std::size_t k = 0; k < n_times; ++k) {
                const double fu = gt.flows[k].u(y, x);
                const double fv = gt.flows[k].v(y, x);
                for (std::size_t i = 0; i < degree; ++i) {
                    rhs_u[i] += design[k * degree + i] * fu;
                    rhs_v[i] += design[k * degree + i] * fv;
                }
            }
            solver.solve(rhs_u);
            solver.solve(rhs_v);
            for (std::size_t i = 1; i <= degree; ++i) {
                field.set_control_point(y, x, i, {rhs_u[i - 1], rhs_v[i - 1]});
            }
        }
    }
    return field;
}

namespace {

constexpr std::array<char, 4> kMagic = {'B', 'Z', 'F', '1'};

void put_u32(std::ostream& out, std::uint32_t value) {
    for (int i = 0; i < 4; ++i) {
        out.put(static_cast<char>((value >> (8 * i)) & 0xff));
    }
}

void put_u64(std::ostream& out, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        out.put(static_cast<char>((value >> (8 * i)) & 0xff));
    }
}

std::uint64_t get_le(std::istream& in, int bytes) {
    std::uint64_t value = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = in.get();
        if (c == EOF) {
            throw TruncatedRecord("trajectory file truncated");
        }
        value |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return value;
}

}  // namespace

void write_bezier_field(const std::string& path, const BezierTrajectoryField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, static_cast<std::uint32_t>(field.height()));
    put_u32(out, static_cast<std::uint32_t>(field.width()));
    put_u32(out, static_cast<std::uint32_t>(field.degree()));
    put_u64(out, field.t_reference());
    put_u64(out, field.t_target());
    for (std::size_t y = 0; y < field.height(); ++y) {
        for (std::size_t x = 0; x < field.width(); ++x) {
            for (std::size_t i = 1; i <= field.degree(); ++i) {
                const Vec2 p = field.control_point(y, x, i);
                put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p.x)));
                put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p.y)));
            }
        }
    }
}

BezierTrajectoryField read_bezier_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::array<char, 4> magic;
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || std::memcmp(magic.data(), kMagic.data(), 4) != 0) {
        throw BadMagic("not a BZF1 file: " + path);
    }
    const std::uint32_t height = static_cast<std::uint32_t>(get_le(in, 4));
    const std::uint32_t width = static_cast<std::uint32_t>(get_le(in, 4));
    const std::uint32_t degree = static_cast<std::uint32_t>(get_le(in, 4));
    const std::uint64_t t_reference = get_le(in, 8);
    const std::uint64_t t_target = get_le(in, 8);
    BezierTrajectoryField field(height, width, degree, t_reference, t_target);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            for (std::size_t i = 1; i <= degree; ++i) {
                const float px = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(in, 4)));
                const float py = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(in, 4)));
                field.set_control_point(y, x, i, {px, py});
            }
        }
    }
    return field;
}

}  // namespace evrep
