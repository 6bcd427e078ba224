//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/config.hpp"

#include <json.hpp>

#include <set>

#include "wavelut/lattice_io.hpp"

namespace wavelut {

using nlohmann::json;

void EnhanceConfig::validate() const {
    if (n < 2) {
        throw ConfigError("config: n must be >= 2");
    }
    if (basis_count < 1) {
        throw ConfigError("config: basis_count must be >= 1");
    }
    if (threads < 0) {
        throw ConfigError("config: threads must be >= 0");
    }
    if (!(fps > 0.0)) {
        throw ConfigError("config: fps must be positive");
    }
    if (!(prior.intensity_gamma > 0.0)) {
        throw ConfigError("config: intensity_gamma must be positive");
    }
    try {
        prior.fusion.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

namespace {

class Reader {
public:
    Reader(const json& obj, std::string where, std::filesystem::path base)
        : obj_(obj), where_(std::move(where)), base_(std::move(base)) {
        if (!obj_.is_object()) {
            throw ConfigError(where_ + ": expected a JSON object");
        }
    }

    void check_keys(const std::set<std::string>& allowed) const {
        for (const auto& [key, value] : obj_.items()) {
            if (!allowed.count(key)) {
                throw ConfigError(where_ + ": unknown key '" + key + "'");
            }
        }
    }

    bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

    template <typename T>
    void get(const char* key, T& out) const {
        if (!has(key)) {
            return;
        }
        const json& v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) {
                    throw ConfigError("");
                }
            } else if constexpr (std::is_arithmetic_v<T>) {
                if (!v.is_number()) {
                    throw ConfigError("");
                }
                if constexpr (std::is_integral_v<T>) {
                    if (!v.is_number_integer() || (std::is_unsigned_v<T> && !v.is_number_unsigned())) {
                        throw ConfigError("");
                    }
                }
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) {
                    throw ConfigError("");
                }
            }
            out = v.get<T>();
        } catch (const std::exception&) {
            throw ConfigError(where_ + ": key '" + key + "' has the wrong type");
        }
    }

    std::filesystem::path path(const char* key) const {
        std::string s;
        get(key, s);
        return resolve(s);
    }

    std::filesystem::path resolve(const std::string& s) const {
        std::filesystem::path p(s);
        return p.is_absolute() || base_.empty() ? p : base_ / p;
    }

    template <typename Fn>
    auto parse(const char* key, Fn&& fn) const {
        std::string s;
        get(key, s);
        try {
            return fn(s);
        } catch (const InvalidArgument& e) {
            throw ConfigError(where_ + ": " + e.what());
        }
    }

    const json& at(const char* key) const { return obj_.at(key); }
    const std::string& where() const { return where_; }
    const std::filesystem::path& base() const { return base_; }

private:
    const json& obj_;
    std::string where_;
    std::filesystem::path base_;
};

void read_fit(const Reader& r, FitJobConfig& job) {
    r.check_keys({"learning_rate", "steps", "batch_frames", "crop", "optimizer", "momentum", "adam_beta1",
                  "adam_beta2", "adam_epsilon", "beta_s", "beta_m", "vartheta", "epsilon", "varpi", "use_ssim",
                  "use_fourier", "checkpoint_every", "monotone_repair", "seed", "n", "init", "embeddings"});
    auto& f = job.fit;
    r.get("learning_rate", f.learning_rate);
    r.get("steps", f.steps);
    r.get("batch_frames", f.batch_frames);
    r.get("crop", f.crop);
    if (r.has("optimizer")) {
        f.optimizer = r.parse("optimizer", parse_optimizer);
    }
    r.get("momentum", f.momentum);
    r.get("adam_beta1", f.adam_beta1);
    r.get("adam_beta2", f.adam_beta2);
    r.get("adam_epsilon", f.adam_epsilon);
    r.get("beta_s", f.constants.beta_s);
    r.get("beta_m", f.constants.beta_m);
    r.get("vartheta", f.constants.vartheta);
    r.get("epsilon", f.constants.epsilon);
    r.get("varpi", f.varpi);
    r.get("use_ssim", f.use_ssim);
    r.get("use_fourier", f.use_fourier);
    r.get("checkpoint_every", f.checkpoint_every);
    r.get("monotone_repair", f.monotone_repair);
    r.get("seed", f.seed);
    r.get("n", job.n);
    if (r.has("init")) {
        job.init = r.path("init");
    }
    if (r.has("embeddings")) {
        job.embeddings = r.path("embeddings");
    }
    if (job.n < 2) {
        throw ConfigError(r.where() + ": n must be >= 2");
    }
    try {
        f.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(r.where() + ": " + e.what());
    }
}

}  // namespace

AppConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    const Reader r(doc, "config", base_dir);
    r.check_keys({"lut", "bases", "n", "basis_count", "predictor", "merge_mode", "intensity_gamma", "fusion",
                  "threads", "output_format", "fps", "fit"});
    AppConfig cfg;
    auto& e = cfg.enhance;
    if (r.has("lut")) {
        e.lut = r.path("lut");
    }
    if (r.has("bases")) {
        const json& b = r.at("bases");
        if (b.is_string()) {
            if (b.get<std::string>() != "builtin") {
                throw ConfigError("config: 'bases' must be \"builtin\" or a list of paths");
            }
        } else if (b.is_array()) {
            for (const auto& item : b) {
                if (!item.is_string()) {
                    throw ConfigError("config: 'bases' entries must be paths");
                }
                e.bases.push_back(r.resolve(item.get<std::string>()));
            }
            if (e.bases.empty()) {
                throw ConfigError("config: 'bases' list is empty");
            }
        } else {
            throw ConfigError("config: 'bases' must be \"builtin\" or a list of paths");
        }
    }
    r.get("n", e.n);
    r.get("basis_count", e.basis_count);
    if (r.has("predictor")) {
        e.predictor = r.path("predictor");
    }
    if (r.has("merge_mode")) {
        e.merge = r.parse("merge_mode", parse_merge_mode);
    }
    r.get("intensity_gamma", e.prior.intensity_gamma);
    if (r.has("fusion")) {
        const Reader fr(r.at("fusion"), "config.fusion", base_dir);
        fr.check_keys({"mapping", "temperature", "smoothing"});
        if (fr.has("mapping")) {
            e.prior.fusion.mapping = fr.parse("mapping", parse_weight_mapping);
        }
        fr.get("temperature", e.prior.fusion.temperature);
        fr.get("smoothing", e.prior.fusion.smoothing);
    }
    r.get("threads", e.threads);
    if (r.has("output_format")) {
        e.output_format = r.parse("output_format", parse_image_format);
    }
    r.get("fps", e.fps);
    e.validate();
    if (r.has("fit")) {
        read_fit(Reader(r.at("fit"), "config.fit", base_dir), cfg.fit);
    }
    return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file_bytes(path);
    } catch (const IoError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

}  // namespace wavelut
