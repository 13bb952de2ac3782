#include "gen3d/generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "gen3d/error.hpp"
#include "gen3d/image.hpp"
#include "gen3d/parallel.hpp"
#include "gen3d/primitives.hpp"

namespace gen3d {

Prompt Prompt::make(std::string text, std::optional<std::uint64_t> seed) {
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c) != 0; })) {
        throw InputError("prompt text must not be empty");
    }
    Prompt p;
    p.seed = seed ? *seed : fnv1a64(text);
    p.text = std::move(text);
    return p;
}

const char* to_string(Pattern p) {
    switch (p) {
        case Pattern::solid: return "solid";
        case Pattern::stripes: return "stripes";
        case Pattern::checker: return "checker";
        case Pattern::fbm: return "fbm";
    }
    return "?";
}

const char* to_string(Shape s) {
    switch (s) {
        case Shape::sphere: return "sphere";
        case Shape::cube: return "cube";
        case Shape::torus: return "torus";
        case Shape::capsule: return "capsule";
    }
    return "?";
}

namespace {

using K = KeywordEntry::Kind;

KeywordEntry color(const char* w, Vec3 c) { return {w, K::color, c}; }
KeywordEntry pattern(const char* w, Pattern p) { return {w, K::pattern, {}, p}; }
KeywordEntry material(const char* w, double rough, double metal) { return {w, K::material, {}, Pattern::solid, rough, metal}; }
KeywordEntry shape(const char* w, Shape s) { return {w, K::shape, {}, Pattern::solid, -1.0, -1.0, s}; }

const std::vector<KeywordEntry>& table() {
    static const std::vector<KeywordEntry> entries = {
        color("red", {1.0, 0.0, 0.0}),
        color("green", {0.0, 0.8, 0.0}),
        color("blue", {0.0, 0.0, 1.0}),
        color("white", {1.0, 1.0, 1.0}),
        color("black", {0.0, 0.0, 0.0}),
        color("yellow", {1.0, 0.9, 0.0}),
        color("orange", {1.0, 0.5, 0.0}),
        color("purple", {0.5, 0.1, 0.6}),
        color("gray", {0.5, 0.5, 0.5}),
        color("grey", {0.5, 0.5, 0.5}),
        color("brown", {0.45, 0.28, 0.12}),
        color("pink", {1.0, 0.6, 0.75}),
        color("cyan", {0.0, 0.9, 0.9}),
        color("gold", {1.0, 0.77, 0.34}),
        color("silver", {0.77, 0.78, 0.78}),
        pattern("solid", Pattern::solid),
        pattern("plain", Pattern::solid),
        pattern("stripes", Pattern::stripes),
        pattern("striped", Pattern::stripes),
        pattern("stripe", Pattern::stripes),
        pattern("checker", Pattern::checker),
        pattern("checkered", Pattern::checker),
        pattern("checkerboard", Pattern::checker),
        pattern("noise", Pattern::fbm),
        pattern("noisy", Pattern::fbm),
        pattern("marble", Pattern::fbm),
        pattern("stone", Pattern::fbm),
        material("metal", 0.35, 1.0),
        material("metallic", 0.35, 1.0),
        material("matte", 0.9, -1.0),
        material("glossy", 0.2, -1.0),
        material("shiny", 0.2, -1.0),
        material("rough", 0.95, -1.0),
        shape("sphere", Shape::sphere),
        shape("ball", Shape::sphere),
        shape("orb", Shape::sphere),
        shape("cube", Shape::cube),
        shape("box", Shape::cube),
        shape("block", Shape::cube),
        shape("torus", Shape::torus),
        shape("donut", Shape::torus),
        shape("doughnut", Shape::torus),
        shape("ring", Shape::torus),
        shape("capsule", Shape::capsule),
        shape("pill", Shape::capsule),
    };
    return entries;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalpha(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) {
        words.push_back(std::move(cur));
    }
    return words;
}

double luminance(const Vec3& c) { return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z; }

Vec3 hsv(double h, double s, double v) {
    const double i = std::floor(h * 6.0);
    const double f = h * 6.0 - i;
    const double p = v * (1 - s), q = v * (1 - f * s), t = v * (1 - (1 - f) * s);
    switch (static_cast<int>(i) % 6) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

double smoothstep(double e0, double e1, double x) {
    const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

/// Uniform double in [0,1) from the top 53 bits.
double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

std::span<const KeywordEntry> keyword_table() { return table(); }

PromptStyle parse_prompt(const Prompt& prompt) {
    PromptStyle style;
    std::vector<Vec3> colors;
    bool pattern_set = false;
    for (const std::string& word : tokenize(prompt.text)) {
        for (const KeywordEntry& e : table()) {
            if (word != e.word) {
                continue;
            }
            switch (e.kind) {
                case K::color:
                    colors.push_back(e.color);
                    break;
                case K::pattern:
                    if (!pattern_set) {
                        style.pattern = e.pattern;
                        pattern_set = true;
                    }
                    break;
                case K::material:
                    if (e.roughness >= 0.0) {
                        style.roughness = e.roughness;
                    }
                    if (e.metalness >= 0.0) {
                        style.metalness = e.metalness;
                    }
                    break;
                case K::shape:
                    style.shapes.push_back(e.shape);
                    break;
            }
        }
    }
    if (colors.empty()) {
        // Deterministic palette from the text itself (not the seed), so a seed override
        // never changes what a prompt "means".
        const std::uint64_t h = fnv1a64(prompt.text);
        const double hue = unit_double(h);
        colors.push_back(hsv(hue, 0.65, 0.9));
        colors.push_back(hsv(std::fmod(hue + 0.5, 1.0), 0.35, 0.55));
        style.palette_from_hash = true;
    }
    style.color_a = colors[0];
    if (colors.size() > 1) {
        style.color_b = colors[1];
    } else {
        style.color_b = luminance(colors[0]) > 0.7 ? Vec3{0.0, 0.0, 0.0} : Vec3{1.0, 1.0, 1.0};
    }
    return style;
}

ProceduralMaterial::ProceduralMaterial(const Prompt& prompt) : style_(parse_prompt(prompt)) {
    std::array<std::uint8_t, kNoiseLattice> p{};
    for (int i = 0; i < kNoiseLattice; ++i) {
        p[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    }
    // Fisher-Yates with an explicit modulo draw so the permutation does not depend on the
    // standard library's distribution implementation.
    std::mt19937_64 rng(prompt.seed);
    for (int i = kNoiseLattice - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(p[static_cast<std::size_t>(i)], p[j]);
    }
    for (std::size_t i = 0; i < perm_.size(); ++i) {
        perm_[i] = p[i % kNoiseLattice];
    }
}

double ProceduralMaterial::noise(Vec3 p) const {
    auto fade = [](double t) { return t * t * t * (t * (t * 6 - 15) + 10); };
    auto wrap = [](double v) {
        const auto i = static_cast<long long>(std::floor(v));
        return static_cast<int>(((i % kNoiseLattice) + kNoiseLattice) % kNoiseLattice);
    };
    auto grad = [](int hash, double x, double y, double z) {
        const int h = hash & 15;
        const double u = h < 8 ? x : y;
        const double v = h < 4 ? y : (h == 12 || h == 14 ? x : z);
        return ((h & 1) == 0 ? u : -u) + ((h & 2) == 0 ? v : -v);
    };
    const int xi = wrap(p.x), yi = wrap(p.y), zi = wrap(p.z);
    const double x = p.x - std::floor(p.x), y = p.y - std::floor(p.y), z = p.z - std::floor(p.z);
    const double u = fade(x), v = fade(y), w = fade(z);
    auto hash = [&](int i, int j, int k) {
        const int a = perm_[static_cast<std::size_t>(i % kNoiseLattice)];
        const int b = perm_[static_cast<std::size_t>(a + (j % kNoiseLattice))];
        return static_cast<int>(perm_[static_cast<std::size_t>(b % kNoiseLattice + (k % kNoiseLattice))]);
    };
    auto corner = [&](int di, int dj, int dk) {
        return grad(hash(xi + di, yi + dj, zi + dk), x - di, y - dj, z - dk);
    };
    auto mix = [](double a, double b, double t) { return a + (b - a) * t; };
    return mix(mix(mix(corner(0, 0, 0), corner(1, 0, 0), u), mix(corner(0, 1, 0), corner(1, 1, 0), u), v),
               mix(mix(corner(0, 0, 1), corner(1, 0, 1), u), mix(corner(0, 1, 1), corner(1, 1, 1), u), v), w);
}

double ProceduralMaterial::fbm(const Vec3& p) const {
    double sum = 0.0;
    double amplitude = 0.5;
    double frequency = kNoiseFrequency;
    for (int octave = 0; octave < 3; ++octave) {
        sum += amplitude * noise(p * frequency);
        amplitude *= 0.5;
        frequency *= 2.0;
    }
    return sum;
}

std::array<double, 5> ProceduralMaterial::evaluate(const Vec3& point, const Vec3& /*normal*/) const {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    double m = 1.0;  // weight of color_a
    switch (style_.pattern) {
        case Pattern::solid:
            break;
        case Pattern::stripes:
            m = smoothstep(-0.5, 0.5, std::sin(kTwoPi * point.y / kStripePeriod));
            break;
        case Pattern::checker: {
            const double s = std::cos(kTwoPi * point.x / kCheckerPeriod) * std::cos(kTwoPi * point.y / kCheckerPeriod) *
                             std::cos(kTwoPi * point.z / kCheckerPeriod);
            m = smoothstep(-0.3, 0.3, s);
            break;
        }
        case Pattern::fbm:
            m = std::clamp(0.5 + 1.2 * fbm(point), 0.0, 1.0);
            break;
    }
    const Vec3 c = style_.color_b + (style_.color_a - style_.color_b) * m;
    return {std::clamp(c.x, 0.0, 1.0), std::clamp(c.y, 0.0, 1.0), std::clamp(c.z, 0.0, 1.0), style_.roughness,
            style_.metalness};
}

MaterialSample ProceduralMaterial::sample(const Vec3& point, const Vec3& normal) const {
    const auto v = evaluate(point, normal);
    return {{v[0], v[1], v[2]}, v[3], v[4]};
}

std::vector<Vec3> ProceduralMaterial::periods() const {
    switch (style_.pattern) {
        case Pattern::solid:
            return {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
        case Pattern::stripes:
            return {{1.0, 0.0, 0.0}, {0.0, kStripePeriod, 0.0}, {0.0, 0.0, 1.0}};
        case Pattern::checker:
            return {{kCheckerPeriod, 0.0, 0.0}, {0.0, kCheckerPeriod, 0.0}, {0.0, 0.0, kCheckerPeriod}};
        case Pattern::fbm: {
            const double period = kNoiseLattice / kNoiseFrequency;
            return {{period, 0.0, 0.0}, {0.0, period, 0.0}, {0.0, 0.0, period}};
        }
    }
    return {};
}

std::array<double, 5> procedural_texture(const Prompt& prompt, const Vec3& point, const Vec3& normal) {
    return ProceduralMaterial(prompt).evaluate(point, normal);
}

std::vector<Vec3> pattern_period(const Prompt& prompt) { return ProceduralMaterial(prompt).periods(); }

Mesh prompt_geometry(const Prompt& prompt) {
    std::vector<Shape> shapes = parse_prompt(prompt).shapes;
    if (shapes.empty()) {
        shapes.push_back(Shape::sphere);
    }
    const std::size_t n = shapes.size();
    // Shapes share the unit cube: each gets a slot of width 1/n along x.
    const double slot = 1.0 / static_cast<double>(n);
    const double s = n == 1 ? 1.0 : std::min(1.0, slot / 0.8);
    std::vector<Mesh> parts;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 c{n == 1 ? 0.0 : -0.5 + slot * (static_cast<double>(i) + 0.5), 0.0, 0.0};
        switch (shapes[i]) {
            case Shape::sphere:
                parts.push_back(primitives::icosphere(c, 0.4 * s, 5));
                break;
            case Shape::cube:
                parts.push_back(primitives::subdivided_box(c, Vec3{0.35, 0.35, 0.35} * s, 8));
                break;
            case Shape::torus:
                parts.push_back(primitives::torus(c, 0.28 * s, 0.12 * s, 96, 48));
                break;
            case Shape::capsule:
                parts.push_back(primitives::capsule(c, 0.2 * s, 0.2 * s, 64, 32));
                break;
        }
    }
    return primitives::merge(parts);
}

GeometryConditioning render_conditioning(const Mesh& mesh, std::span<const Camera> cameras) {
    GeometryConditioning cond;
    cond.buffers.resize(cameras.size());
    parallel_for(cameras.size(), [&](std::size_t i) { cond.buffers[i] = rasterize(mesh, cameras[i], nullptr, {}); });
    return cond;
}

void check_view_set(const GeneratedViewSet& set, std::span<const Camera> cameras) {
    if (set.views.size() != cameras.size()) {
        throw InputError("generator returned " + std::to_string(set.views.size()) + " views for " +
                         std::to_string(cameras.size()) + " cameras");
    }
    for (std::size_t i = 0; i < set.views.size(); ++i) {
        const RenderedView& v = set.views[i];
        const int r = cameras[i].resolution;
        const auto px = static_cast<std::size_t>(r) * r;
        auto ok = [&](const Image& img, int c) {
            return img.width == r && img.height == r && img.channels == c && img.data.size() == px * c;
        };
        if (v.resolution != r || !ok(v.shaded, 3) || !ok(v.albedo, 3) || !ok(v.material, 2) || !ok(v.depth, 1) ||
            v.mask.size() != px) {
            throw InputError("generated view " + std::to_string(i) + " does not match camera resolution " +
                             std::to_string(r));
        }
    }
}

Vec3 ProceduralBackend::jitter_direction(std::uint64_t seed, std::size_t index) {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1)));
    const double a = unit_double(rng()), b = unit_double(rng()), c = unit_double(rng());
    return {2.0 * a - 1.0, 2.0 * b - 1.0, 2.0 * c - 1.0};
}

GeneratedViewSet ProceduralBackend::generate(const Prompt& prompt, std::span<const Camera> cameras,
                                             const GeometryConditioning* conditioning) {
    if (cameras.empty()) {
        throw InputError("generate_views: at least one camera is required");
    }
    if (conditioning != nullptr && conditioning->buffers.size() != cameras.size()) {
        throw InputError("generate_views: " + std::to_string(conditioning->buffers.size()) +
                         " conditioning buffers for " + std::to_string(cameras.size()) + " cameras");
    }
    const ProceduralMaterial material(prompt);
    GeneratedViewSet set;
    set.conditioned = conditioning != nullptr;
    set.views.resize(cameras.size());
    const Mesh geometry = conditioning == nullptr ? prompt_geometry(prompt) : Mesh{};

    parallel_for(cameras.size(), [&](std::size_t vi) {
        const Camera& cam = cameras[vi];
        cam.validate();
        RenderedView view = conditioning == nullptr ? rasterize(geometry, cam, nullptr, settings_.light)
                                                    : conditioning->buffers[vi];
        if (view.resolution != cam.resolution) {
            throw InputError("generate_views: conditioning buffer " + std::to_string(vi) +
                             " does not match camera resolution");
        }
        const int r = view.resolution;
        view.shaded = Image(r, r, 3);
        view.albedo = Image(r, r, 3);
        view.material = Image(r, r, 2);
        const Vec3 offset = jitter_direction(prompt.seed, vi) * settings_.jitter;
        const Vec3 fwd = cam.forward();
        for (int y = 0; y < r; ++y) {
            for (int x = 0; x < r; ++x) {
                if (!view.covered(x, y)) {
                    continue;
                }
                const Vec3 dir = cam.ray_direction({x + 0.5, y + 0.5});
                const Vec3 point = cam.position + dir * (view.depth.at(x, y, 0) / dot(dir, fwd));
                const Vec3 n = normalize(Vec3{view.normal.at(x, y, 0), view.normal.at(x, y, 1), view.normal.at(x, y, 2)});
                const MaterialSample m = material.sample(point, n);
                const Vec3 lit = shade(m, n, normalize(cam.position - point), settings_.light);
                for (int c = 0; c < 3; ++c) {
                    view.albedo.at(x, y, c) = static_cast<float>(std::clamp(m.albedo[c] + offset[c], 0.0, 1.0));
                    view.shaded.at(x, y, c) = static_cast<float>(std::clamp(lit[c] + offset[c], 0.0, 1.0));
                }
                view.material.at(x, y, 0) = static_cast<float>(m.roughness);
                view.material.at(x, y, 1) = static_cast<float>(m.metalness);
            }
        }
        set.views[vi] = std::move(view);
    });
    return set;
}

}  // namespace gen3d
