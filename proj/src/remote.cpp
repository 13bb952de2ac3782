#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gen3d/error.hpp"
#include "gen3d/generators.hpp"
#include "gen3d/image.hpp"

namespace gen3d {

namespace {

using json = nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Image decode_b64_png(const json& view, const char* key, std::size_t index) {
    if (!view.contains(key) || !view[key].is_string()) {
        throw BackendError("protocol error: view " + std::to_string(index) + " lacks " + key);
    }
    try {
        return decode_png_float(base64_decode(view[key].get<std::string>()));
    } catch (const std::exception& e) {
        throw BackendError("protocol error: view " + std::to_string(index) + " " + key + ": " + e.what());
    }
}

void expect_size(const Image& img, int res, int min_channels, std::size_t index, const char* key) {
    if (img.width != res || img.height != res || img.channels < min_channels) {
        throw BackendError("protocol error: view " + std::to_string(index) + " " + key + " is " +
                           std::to_string(img.width) + "x" + std::to_string(img.height) + ", expected " +
                           std::to_string(res) + "x" + std::to_string(res));
    }
}

Image take_channels(const Image& src, int channels) {
    Image out(src.width, src.height, channels);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            for (int c = 0; c < channels; ++c) {
                out.at(x, y, c) = src.at(x, y, c);
            }
        }
    }
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_depth_png(const Image& depth, const Camera& camera) {
    PngImage png{depth.width, depth.height, 1, 16, {}};
    png.samples.resize(static_cast<std::size_t>(depth.width) * depth.height);
    const double range = camera.far_plane - camera.near_plane;
    for (std::size_t i = 0; i < png.samples.size(); ++i) {
        const double d = depth.data[i];
        if (!std::isfinite(d)) {
            png.samples[i] = 0;
            continue;
        }
        const double t = std::clamp((d - camera.near_plane) / range, 0.0, 1.0);
        png.samples[i] = static_cast<std::uint16_t>(1 + std::lround(t * 65534.0));
    }
    return encode_png(png);
}

Image decode_depth_png(std::span<const std::uint8_t> bytes, const Camera& camera) {
    const PngImage png = decode_png(bytes);
    if (png.channels != 1 || png.bit_depth != 16) {
        throw BackendError("protocol error: depth PNG must be 16-bit grayscale");
    }
    Image depth(png.width, png.height, 1);
    const double range = camera.far_plane - camera.near_plane;
    for (std::size_t i = 0; i < png.samples.size(); ++i) {
        const std::uint16_t s = png.samples[i];
        depth.data[i] = s == 0 ? kNoDepth
                               : static_cast<float>(camera.near_plane + (s - 1) / 65534.0 * range);
    }
    return depth;
}

std::string encode_generate_request(const Prompt& prompt, std::span<const Camera> cameras,
                                    const GeometryConditioning* conditioning) {
    json req;
    req["prompt"] = prompt.text;
    req["seed"] = prompt.seed;
    json cams = json::array();
    for (const Camera& c : cameras) {
        cams.push_back({{"position", vec_json(c.position)},
                        {"target", vec_json(c.target)},
                        {"up", vec_json(c.up)},
                        {"fov", c.fov_deg},
                        {"resolution", c.resolution},
                        {"near", c.near_plane},
                        {"far", c.far_plane}});
    }
    req["cameras"] = cams;
    if (conditioning != nullptr) {
        json depth = json::array(), normal = json::array();
        for (std::size_t i = 0; i < conditioning->buffers.size(); ++i) {
            const RenderedView& v = conditioning->buffers[i];
            depth.push_back(base64_encode(encode_depth_png(v.depth, cameras[i])));
            Image n(v.resolution, v.resolution, 3);
            for (std::size_t k = 0; k < n.data.size(); ++k) {
                n.data[k] = v.mask[k / 3] != 0 ? 0.5f * v.normal.data[k] + 0.5f : 0.0f;
            }
            normal.push_back(base64_encode(encode_png8(n, 3)));
        }
        req["conditioning"] = {{"depth_png_b64", depth}, {"normal_png_b64", normal}};
    }
    return req.dump();
}

GeneratedViewSet decode_generate_response(std::string_view body, std::span<const Camera> cameras,
                                          const GeometryConditioning* conditioning) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw BackendError(std::string("protocol error: response is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("views") || !doc["views"].is_array()) {
        throw BackendError("protocol error: response has no views array");
    }
    const json& views = doc["views"];
    if (views.size() != cameras.size()) {
        throw BackendError("protocol error: " + std::to_string(views.size()) + " views for " +
                           std::to_string(cameras.size()) + " cameras");
    }
    GeneratedViewSet set;
    set.conditioned = conditioning != nullptr;
    for (std::size_t i = 0; i < views.size(); ++i) {
        const json& v = views[i];
        const int res = cameras[i].resolution;
        RenderedView view = conditioning != nullptr ? conditioning->buffers[i] : RenderedView(res);
        const Image shaded = decode_b64_png(v, "shaded_png_b64", i);
        const Image albedo = decode_b64_png(v, "albedo_png_b64", i);
        expect_size(shaded, res, 3, i, "shaded");
        expect_size(albedo, res, 3, i, "albedo");
        view.shaded = take_channels(shaded, 3);
        view.albedo = take_channels(albedo, 3);
        view.material = Image(res, res, 2);
        if (v.contains("material_png_b64")) {
            const Image m = decode_b64_png(v, "material_png_b64", i);
            expect_size(m, res, 2, i, "material");
            view.material = take_channels(m, 2);
        } else {
            for (std::size_t k = 0; k < view.material.data.size(); k += 2) {
                view.material.data[k] = static_cast<float>(kDefaultMaterial.roughness);
                view.material.data[k + 1] = static_cast<float>(kDefaultMaterial.metalness);
            }
        }
        if (conditioning == nullptr) {
            if (!v.contains("depth_png_b64") || !v.contains("mask_png_b64")) {
                throw BackendError("protocol error: unconditioned view " + std::to_string(i) + " needs depth and mask");
            }
            Image depth;
            try {
                depth = decode_depth_png(base64_decode(v["depth_png_b64"].get<std::string>()), cameras[i]);
            } catch (const BackendError&) {
                throw;
            } catch (const std::exception& e) {
                throw BackendError("protocol error: view " + std::to_string(i) + " depth: " + e.what());
            }
            expect_size(depth, res, 1, i, "depth");
            const Image mask = decode_b64_png(v, "mask_png_b64", i);
            expect_size(mask, res, 1, i, "mask");
            view.depth = depth;
            if (v.contains("normal_png_b64")) {
                const Image n = decode_b64_png(v, "normal_png_b64", i);
                expect_size(n, res, 3, i, "normal");
                view.normal = Image(res, res, 3);
                for (std::size_t k = 0; k < view.normal.data.size(); ++k) {
                    view.normal.data[k] = 2.0f * n.data[(k / 3) * n.channels + k % 3] - 1.0f;
                }
            }
            for (std::size_t k = 0; k < view.mask.size(); ++k) {
                const bool covered = mask.data[k * mask.channels] > 0.5f && std::isfinite(depth.data[k]);
                view.mask[k] = covered ? 1 : 0;
                if (!covered) {
                    view.depth.data[k] = kNoDepth;
                }
            }
        }
        set.views.push_back(std::move(view));
    }
    return set;
}

RemoteSettings RemoteSettings::from_env() {
    RemoteSettings s;
    if (const char* e = std::getenv(kEndpointEnv)) {
        s.endpoint = e;
    }
    if (const char* t = std::getenv(kTokenEnv)) {
        s.bearer_token = t;
    }
    return s;
}

RemoteBackend::RemoteBackend(RemoteSettings settings)
    : settings_(std::move(settings)), in_flight_(std::clamp(settings_.max_in_flight, 1, 64)) {
    if (settings_.endpoint.rfind("http://", 0) != 0) {
        throw InputError("remote endpoint must start with http://, got '" + settings_.endpoint + "'");
    }
    if (!(settings_.timeout_s > 0.0) || settings_.retries < 0 || settings_.max_in_flight < 1) {
        throw InputError("remote backend: timeout must be positive, retries ≥ 0, max_in_flight ≥ 1");
    }
}

std::string RemoteBackend::last_raw_response() const {
    std::lock_guard lock(mutex_);
    return last_raw_;
}

GeneratedViewSet RemoteBackend::generate(const Prompt& prompt, std::span<const Camera> cameras,
                                         const GeometryConditioning* conditioning) {
    if (cameras.empty()) {
        throw InputError("generate_views: at least one camera is required");
    }
    if (conditioning != nullptr && conditioning->buffers.size() != cameras.size()) {
        throw InputError("generate_views: conditioning buffer count differs from camera count");
    }
    const int call = call_counter_++;
    const std::string body = encode_generate_request(prompt, cameras, conditioning);

    // "http://host:port/prefix" → client for "http://host:port", path "/prefix/v1/generate_views".
    const std::size_t path_start = settings_.endpoint.find('/', 7);
    const std::string origin = settings_.endpoint.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : settings_.endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    const std::string path = prefix + "/v1/generate_views";

    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<64>& s;
        ~Release() { s.release(); }
    } release{in_flight_};

    const auto timeout = std::chrono::duration<double>(settings_.timeout_s);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    const int attempts = settings_.retries + 1;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (cancelled_) {
            throw BackendError("remote backend cancelled", attempt - 1);
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            throw BackendError("remote backend timed out after " + std::to_string(attempt - 1) + " attempts: " + last_error,
                               attempt - 1);
        }
        httplib::Client client(origin);
        const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        client.set_connection_timeout(remaining);
        client.set_read_timeout(remaining);
        client.set_write_timeout(remaining);
        httplib::Headers headers;
        if (!settings_.bearer_token.empty()) {
            headers.emplace("Authorization", "Bearer " + settings_.bearer_token);
        }
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
        } else if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
        } else if (res->status != 200) {
            std::string message = res->body;
            try {
                const json err = json::parse(res->body);
                message = err.value("code", std::string{}) + " " + err.value("message", std::string{});
            } catch (const json::exception&) {
            }
            throw BackendError("remote backend rejected the request (HTTP " + std::to_string(res->status) + "): " + message,
                               attempt);
        } else {
            {
                std::lock_guard lock(mutex_);
                last_raw_ = res->body;
            }
            if (!settings_.record_dir.empty()) {
                write_file(settings_.record_dir / ("response_" + std::to_string(call) + ".json"), res->body);
            }
            try {
                return decode_generate_response(res->body, cameras, conditioning);
            } catch (const BackendError& e) {
                throw BackendError(e.what(), attempt);
            }
        }
        if (attempt < attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
        }
    }
    throw BackendError("remote backend failed after " + std::to_string(attempts) + " attempts: " + last_error, attempts);
}

GeneratedViewSet ReplayBackend::generate(const Prompt& /*prompt*/, std::span<const Camera> cameras,
                                         const GeometryConditioning* conditioning) {
    const auto path = dir_ / ("response_" + std::to_string(call_counter_++) + ".json");
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file(path);
    } catch (const std::exception& e) {
        throw BackendError("replay: " + std::string(e.what()));
    }
    return decode_generate_response(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                                    cameras, conditioning);
}

}  // namespace gen3d
