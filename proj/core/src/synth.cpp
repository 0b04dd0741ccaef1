#include "evrep/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

namespace evrep {

MotionModel MotionModel::constant_velocity(double vx, double vy) {
    return MotionModel(ConstantVelocity{vx, vy});
}

MotionModel MotionModel::circular(Vec2 center, double radius, double angular_rate) {
    return MotionModel(Circular{center, radius, angular_rate});
}

MotionModel MotionModel::polynomial(std::vector<double> coeffs_x, std::vector<double> coeffs_y) {
    return MotionModel(Polynomial{std::move(coeffs_x), std::move(coeffs_y)});
}

namespace {

// sum_k c_k tau^k / k!, evaluated Horner-style on the scaled coefficients
double taylor(const std::vector<double>& coeffs, double tau) {
    double acc = 0.0;
    double factorial = 1.0;
    double power = 1.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (k > 0) {
            factorial *= static_cast<double>(k);
            power *= tau;
        }
        acc += coeffs[k] * power / factorial;
    }
    return acc;
}

double taylor_derivative(const std::vector<double>& coeffs, double tau) {
    double acc = 0.0;
    double factorial = 1.0;
    double power = 1.0;
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        if (k > 1) {
            factorial *= static_cast<double>(k - 1);
            power *= tau;
        }
        acc += coeffs[k] * power / factorial;
    }
    return acc;
}

}  // namespace

Vec2 MotionModel::position(double tau) const {
    return std::visit(
        [tau](const auto& m) -> Vec2 {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantVelocity>) {
                return {m.vx * tau, m.vy * tau};
            } else if constexpr (std::is_same_v<T, Circular>) {
                const double angle = m.angular_rate * tau;
                return {m.center.x + m.radius * std::cos(angle),
                        m.center.y + m.radius * std::sin(angle)};
            } else {
                return {taylor(m.coeffs_x, tau), taylor(m.coeffs_y, tau)};
            }
        },
        model_);
}

Vec2 MotionModel::velocity(double tau) const {
    return std::visit(
        [tau](const auto& m) -> Vec2 {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantVelocity>) {
                return {m.vx, m.vy};
            } else if constexpr (std::is_same_v<T, Circular>) {
                const double angle = m.angular_rate * tau;
                return {-m.radius * m.angular_rate * std::sin(angle),
                        m.radius * m.angular_rate * std::cos(angle)};
            } else {
                return {taylor_derivative(m.coeffs_x, tau), taylor_derivative(m.coeffs_y, tau)};
            }
        },
        model_);
}

namespace {

constexpr int kVelocitySamples = 4096;

std::vector<Vec2> tracked_offsets(const SceneObject& object, const SensorGeometry& geometry) {
    return std::visit(
        [&](const auto& shape) -> std::vector<Vec2> {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, VerticalEdge>) {
                std::vector<Vec2> offsets;
                offsets.reserve(geometry.height);
                for (std::size_t y = 0; y < geometry.height; ++y) {
                    offsets.push_back({shape.x0, static_cast<double>(y)});
                }
                return offsets;
            } else {
                return shape.offsets;
            }
        },
        object.shape);
}

/// Times in [0, duration] where the velocity component changes sign, i.e. the
/// coordinate's extrema. Sampled on a fine grid, then bisected.
std::vector<double> monotonic_boundaries(const MotionModel& motion, int axis, double duration) {
    std::vector<double> boundaries = {0.0, duration};
    const auto vel = [&](double tau) {
        const Vec2 v = motion.velocity(tau);
        return axis == 0 ? v.x : v.y;
    };
    double prev_tau = 0.0;
    double prev_v = vel(0.0);
    for (int j = 1; j <= kVelocitySamples; ++j) {
        const double tau = duration * static_cast<double>(j) / kVelocitySamples;
        const double v = vel(tau);
        if (prev_v == 0.0) {
            boundaries.push_back(prev_tau);
        } else if (v != 0.0 && std::signbit(v) != std::signbit(prev_v)) {
            double lo = prev_tau;
            double hi = tau;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (std::signbit(vel(mid)) == std::signbit(prev_v)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            boundaries.push_back(0.5 * (lo + hi));
        }
        prev_tau = tau;
        prev_v = v;
    }
    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());
    return boundaries;
}

/// Root of coord(tau) = target within a segment where coord is monotonic.
double bisect_crossing(const auto& coord, double lo, double hi, double target) {
    double g_lo = coord(lo) - target;
    if (g_lo == 0.0) {
        return lo;
    }
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = coord(mid) - target;
        if (g_mid == 0.0) {
            return mid;
        }
        if (std::signbit(g_mid) == std::signbit(g_lo)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// All times where one axis of the point's path passes through an integer
/// coordinate. A start position exactly on an integer counts when the point is
/// actually moving along that axis at the start.
void axis_crossings(const MotionModel& motion, Vec2 offset, int axis,
                    const std::vector<double>& boundaries, std::vector<double>& out) {
    const auto coord = [&](double tau) {
        const Vec2 p = motion.position(tau);
        return (axis == 0 ? p.x : p.y) + (axis == 0 ? offset.x : offset.y);
    };
    const double start_value = coord(boundaries.front());
    const Vec2 v0 = motion.velocity(boundaries.front());
    const double start_velocity = axis == 0 ? v0.x : v0.y;
    if (start_value == std::floor(start_value) && start_velocity != 0.0) {
        out.push_back(boundaries.front());
    }
    for (std::size_t s = 0; s + 1 < boundaries.size(); ++s) {
        const double lo = boundaries[s];
        const double hi = boundaries[s + 1];
        const double va = coord(lo);
        const double vb = coord(hi);
        if (vb > va) {
            for (double k = std::floor(va) + 1.0; k <= vb; k += 1.0) {
                out.push_back(bisect_crossing(coord, lo, hi, k));
            }
        } else if (vb < va) {
            for (double k = std::ceil(vb); k < va; k += 1.0) {
                out.push_back(bisect_crossing(coord, lo, hi, k));
            }
        }
    }
}

struct RankedEvent {
    std::uint64_t t;
    std::uint16_t x;
    std::uint16_t y;
    std::uint32_t rank;  // object index, hot pixels after all objects
};

}  // namespace

EventStream emit_events(const SyntheticScene& scene, std::uint64_t seed) {
    const double duration =
        static_cast<double>(scene.window.duration_us()) * 1e-6;  // seconds
    std::vector<RankedEvent> ranked;

    for (std::size_t oi = 0; oi < scene.objects.size(); ++oi) {
        const SceneObject& object = scene.objects[oi];
        const std::array<std::vector<double>, 2> boundaries = {
            monotonic_boundaries(object.motion, 0, duration),
            monotonic_boundaries(object.motion, 1, duration)};
        for (const Vec2 offset : tracked_offsets(object, scene.geometry)) {
            std::vector<double> times;
            axis_crossings(object.motion, offset, 0, boundaries[0], times);
            axis_crossings(object.motion, offset, 1, boundaries[1], times);
            for (const double tau : times) {
                const Vec2 p = object.motion.position(tau) + offset;
                const long px = std::lround(p.x);
                const long py = std::lround(p.y);
                if (px < 0 || py < 0 || px >= scene.geometry.width
                    || py >= scene.geometry.height) {
                    continue;  // clips silently at the border
                }
                const std::uint64_t t =
                    scene.window.t_start + static_cast<std::uint64_t>(std::llround(tau * 1e6));
                ranked.push_back({t, static_cast<std::uint16_t>(px),
                                  static_cast<std::uint16_t>(py),
                                  static_cast<std::uint32_t>(oi)});
            }
        }
    }
    const std::size_t object_event_count = ranked.size();
    if (!scene.objects.empty() && object_event_count == 0) {
        throw EmptyScene("no object emitted any event");
    }

    SplitMix64 master(seed);
    for (std::size_t hi = 0; hi < scene.hot_pixels.size(); ++hi) {
        const HotPixel& hp = scene.hot_pixels[hi];
        SplitMix64 rng(master.next());
        if (hp.rate <= 0.0 || hp.x >= scene.geometry.width || hp.y >= scene.geometry.height) {
            continue;
        }
        double tau = 0.0;
        while (true) {
            tau += -std::log(1.0 - rng.next_double()) / hp.rate;
            if (tau > duration) {
                break;
            }
            const std::uint64_t t =
                scene.window.t_start + static_cast<std::uint64_t>(std::llround(tau * 1e6));
            ranked.push_back({t, hp.x, hp.y,
                              static_cast<std::uint32_t>(scene.objects.size() + hi)});
        }
    }
    if (ranked.empty()) {
        throw EmptyScene("scene emitted no events");
    }

    std::sort(ranked.begin(), ranked.end(), [](const RankedEvent& a, const RankedEvent& b) {
        return std::tie(a.t, a.rank, a.y, a.x) < std::tie(b.t, b.rank, b.y, b.x);
    });
    std::vector<Event> events;
    events.reserve(ranked.size());
    for (const RankedEvent& r : ranked) {
        events.push_back(Event{r.t, r.x, r.y, +1});
    }
    return EventStream(scene.geometry, std::move(events));
}

GroundTruth::GroundTruth(SyntheticScene scene)
    : scene_(std::move(scene)), object_at_(scene_.geometry.pixel_count(), -1) {
    for (std::size_t oi = 0; oi < scene_.objects.size(); ++oi) {
        const SceneObject& object = scene_.objects[oi];
        const Vec2 start = object.motion.position(0.0);
        for (const Vec2 offset : tracked_offsets(object, scene_.geometry)) {
            const long px = std::lround(start.x + offset.x);
            const long py = std::lround(start.y + offset.y);
            if (px < 0 || py < 0 || px >= scene_.geometry.width || py >= scene_.geometry.height) {
                continue;
            }
            object_at_[static_cast<std::size_t>(py) * scene_.geometry.width + px] =
                static_cast<int>(oi);
        }
    }
}

FlowField GroundTruth::flow_at(double tau) const {
    FlowField field(scene_.geometry.height, scene_.geometry.width);
    std::vector<Vec2> displacement(scene_.objects.size());
    for (std::size_t oi = 0; oi < scene_.objects.size(); ++oi) {
        displacement[oi] = scene_.objects[oi].motion.displacement(tau);
    }
    for (std::size_t y = 0; y < field.height(); ++y) {
        for (std::size_t x = 0; x < field.width(); ++x) {
            const int oi = object_at_[y * field.width() + x];
            if (oi >= 0) {
                field.set(y, x, static_cast<float>(displacement[oi].x),
                          static_cast<float>(displacement[oi].y));
            }
        }
    }
    return field;
}

FlowField GroundTruth::velocity_at(double tau) const {
    FlowField field(scene_.geometry.height, scene_.geometry.width);
    std::vector<Vec2> velocity(scene_.objects.size());
    for (std::size_t oi = 0; oi < scene_.objects.size(); ++oi) {
        velocity[oi] = scene_.objects[oi].motion.velocity(tau);
    }
    for (std::size_t y = 0; y < field.height(); ++y) {
        for (std::size_t x = 0; x < field.width(); ++x) {
            const int oi = object_at_[y * field.width() + x];
            if (oi >= 0) {
                field.set(y, x, static_cast<float>(velocity[oi].x),
                          static_cast<float>(velocity[oi].y));
            }
        }
    }
    return field;
}

std::optional<Vec2> GroundTruth::trajectory(std::size_t x, std::size_t y, double tau) const {
    if (x >= scene_.geometry.width || y >= scene_.geometry.height) {
        return std::nullopt;
    }
    const int oi = object_at_[y * scene_.geometry.width + x];
    if (oi < 0) {
        return std::nullopt;
    }
    return scene_.objects[static_cast<std::size_t>(oi)].motion.displacement(tau);
}

namespace {

struct SceneSection {
    std::string name;
    std::size_t line = 0;
    std::map<std::string, std::pair<std::string, std::size_t>> entries;
};

std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double require_double(const SceneSection& section, const std::string& key) {
    const auto it = section.entries.find(key);
    if (it == section.entries.end()) {
        throw MalformedLine(section.line, "section [" + section.name + "] missing key " + key);
    }
    try {
        std::size_t used = 0;
        const double value = std::stod(it->second.first, &used);
        if (used != it->second.first.size()) {
            throw std::invalid_argument(key);
        }
        return value;
    } catch (const std::exception&) {
        throw MalformedLine(it->second.second, key + " must be a number");
    }
}

std::vector<double> require_list(const SceneSection& section, const std::string& key) {
    const auto it = section.entries.find(key);
    if (it == section.entries.end()) {
        throw MalformedLine(section.line, "section [" + section.name + "] missing key " + key);
    }
    std::vector<double> values;
    std::stringstream ss(it->second.first);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(trim_copy(item)));
        } catch (const std::exception&) {
            throw MalformedLine(it->second.second, key + " must be a comma-separated number list");
        }
    }
    if (values.empty()) {
        throw MalformedLine(it->second.second, key + " must not be empty");
    }
    return values;
}

MotionModel parse_motion(const SceneSection& section) {
    const auto it = section.entries.find("motion");
    if (it == section.entries.end()) {
        throw MalformedLine(section.line, "object missing motion");
    }
    const std::string& kind = it->second.first;
    if (kind == "constant_velocity") {
        return MotionModel::constant_velocity(require_double(section, "vx"),
                                              require_double(section, "vy"));
    }
    if (kind == "circular") {
        const std::vector<double> center = require_list(section, "center");
        if (center.size() != 2) {
            throw MalformedLine(section.line, "center must be cx,cy");
        }
        return MotionModel::circular({center[0], center[1]}, require_double(section, "radius"),
                                     require_double(section, "angular_rate"));
    }
    if (kind == "polynomial") {
        return MotionModel::polynomial(require_list(section, "coeffs_x"),
                                       require_list(section, "coeffs_y"));
    }
    throw MalformedLine(it->second.second, "unknown motion kind '" + kind + "'");
}

SceneObject parse_object(const SceneSection& section) {
    const auto it = section.entries.find("shape");
    if (it == section.entries.end()) {
        throw MalformedLine(section.line, "object missing shape");
    }
    const std::string& kind = it->second.first;
    if (kind == "vertical_edge") {
        return SceneObject{VerticalEdge{require_double(section, "x0")}, parse_motion(section)};
    }
    if (kind == "point_cloud") {
        const auto points_it = section.entries.find("points");
        if (points_it == section.entries.end()) {
            throw MalformedLine(section.line, "point_cloud missing points");
        }
        PointCloud cloud;
        std::stringstream ss(points_it->second.first);
        std::string pair;
        while (std::getline(ss, pair, ';')) {
            std::stringstream ps(pair);
            std::string sx;
            std::string sy;
            if (!std::getline(ps, sx, ',') || !std::getline(ps, sy)) {
                throw MalformedLine(points_it->second.second, "points must be `x,y; x,y; ...`");
            }
            try {
                cloud.offsets.push_back({std::stod(trim_copy(sx)), std::stod(trim_copy(sy))});
            } catch (const std::exception&) {
                throw MalformedLine(points_it->second.second, "points must be numeric");
            }
        }
        if (cloud.offsets.empty()) {
            throw MalformedLine(points_it->second.second, "points must not be empty");
        }
        return SceneObject{std::move(cloud), parse_motion(section)};
    }
    throw MalformedLine(it->second.second, "unknown shape '" + kind + "'");
}

}  // namespace

SyntheticScene parse_scene(std::istream& text) {
    std::vector<SceneSection> sections;
    sections.push_back({"scene", 0, {}});
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(text, line)) {
        ++line_number;
        const std::string body = trim_copy(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        if (body.front() == '[') {
            if (body.back() != ']') {
                throw MalformedLine(line_number, "unterminated section header");
            }
            sections.push_back({body.substr(1, body.size() - 2), line_number, {}});
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            throw MalformedLine(line_number, "expected `key = value`");
        }
        const std::string key = trim_copy(body.substr(0, eq));
        const std::string value = trim_copy(body.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw MalformedLine(line_number, "expected `key = value`");
        }
        sections.back().entries[key] = {value, line_number};
    }

    const SceneSection& top = sections.front();
    const double width = require_double(top, "width");
    const double height = require_double(top, "height");
    const double t_start = require_double(top, "t_start_us");
    const double t_end = require_double(top, "t_end_us");
    if (width < 1 || height < 1 || width > 0xffff || height > 0xffff) {
        throw MalformedLine(top.line, "width/height must be in [1, 65535]");
    }
    if (t_start < 0 || t_end <= t_start) {
        throw MalformedLine(top.line, "window must satisfy 0 <= t_start_us < t_end_us");
    }
    SyntheticScene scene{
        SensorGeometry{static_cast<std::uint16_t>(width), static_cast<std::uint16_t>(height)},
        TimeWindow(static_cast<std::uint64_t>(t_start), static_cast<std::uint64_t>(t_end)),
        {},
        {}};
    for (std::size_t i = 1; i < sections.size(); ++i) {
        const SceneSection& section = sections[i];
        if (section.name == "object") {
            scene.objects.push_back(parse_object(section));
        } else if (section.name == "hot_pixel") {
            const double x = require_double(section, "x");
            const double y = require_double(section, "y");
            const double rate = require_double(section, "rate");
            if (x < 0 || y < 0 || x >= width || y >= height) {
                throw MalformedLine(section.line, "hot pixel outside the sensor");
            }
            if (rate <= 0.0) {
                throw MalformedLine(section.line, "hot pixel rate must be positive");
            }
            scene.hot_pixels.push_back(HotPixel{static_cast<std::uint16_t>(x),
                                                static_cast<std::uint16_t>(y), rate});
        } else {
            throw MalformedLine(section.line, "unknown section [" + section.name + "]");
        }
    }
    return scene;
}

SyntheticScene parse_scene_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    return parse_scene(in);
}

}  // namespace evrep
