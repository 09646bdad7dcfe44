#include <cstring>
#include <fstream>

#include <json.hpp>

#include "varigen/errors.hpp"
#include "varigen/vq_generator.hpp"

namespace varigen::vq {

namespace {

constexpr char kMagic[8] = {'V', 'G', 'C', 'K', 'P', 'T', '0', '1'};

nlohmann::json config_to_json(const GeneratorConfig& c) {
    return nlohmann::json{{"K", c.K},
                          {"latent_dim", c.latent_dim},
                          {"grid", c.grid},
                          {"lambda", c.lambda},
                          {"beta", c.beta},
                          {"learning_rate", c.learning_rate},
                          {"seed", c.seed},
                          {"sampling_mode", sampling_mode_name(c.sampling_mode)},
                          {"resolution", c.resolution},
                          {"hidden1", c.hidden1},
                          {"hidden2", c.hidden2},
                          {"scalar_variance_per_patch", c.scalar_variance_per_patch},
                          {"stats_post_quantization", c.stats_post_quantization}};
}

GeneratorConfig config_from_json(const nlohmann::json& j) {
    GeneratorConfig c;
    c.K = j.at("K").get<int>();
    c.latent_dim = j.at("latent_dim").get<int>();
    c.grid = j.at("grid").get<int>();
    c.lambda = j.at("lambda").get<double>();
    c.beta = j.at("beta").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.seed = j.at("seed").get<uint64_t>();
    c.sampling_mode = parse_sampling_mode(j.at("sampling_mode").get<std::string>());
    c.resolution = j.at("resolution").get<int>();
    c.hidden1 = j.at("hidden1").get<int>();
    c.hidden2 = j.at("hidden2").get<int>();
    c.scalar_variance_per_patch = j.at("scalar_variance_per_patch").get<bool>();
    c.stats_post_quantization = j.at("stats_post_quantization").get<bool>();
    return c;
}

void append_tensor(nlohmann::json& dir, std::vector<float>& payload, const std::string& name,
                   const Tensor& t) {
    nlohmann::json entry;
    entry["name"] = name;
    entry["shape"] = t.shape;
    entry["offset"] = payload.size();
    entry["count"] = t.values.size();
    dir.push_back(entry);
    for (double v : t.values) payload.push_back(static_cast<float>(v));
}

}  // namespace

void save_checkpoint(const VqGenerator& generator, const std::string& path) {
    nlohmann::json dir = nlohmann::json::array();
    std::vector<float> payload;
    for (const auto& name : generator.parameter_names()) {
        append_tensor(dir, payload, "param:" + name, generator.parameter(name));
    }
    for (const auto& [name, t] : generator.adam_m()) append_tensor(dir, payload, "adam_m:" + name, t);
    for (const auto& [name, t] : generator.adam_v()) append_tensor(dir, payload, "adam_v:" + name, t);

    nlohmann::json header;
    header["format"] = 1;
    header["config"] = config_to_json(generator.config());
    header["seed"] = generator.config().seed;
    header["adam_t"] = generator.adam_step_count();
    header["tensors"] = dir;
    const std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoFailure, "cannot write checkpoint: " + path);
    out.write(kMagic, 8);
    const uint64_t len = header_str.size();
    char len_le[8];
    for (int i = 0; i < 8; ++i) len_le[i] = static_cast<char>((len >> (8 * i)) & 0xff);
    out.write(len_le, 8);
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    // payload is little-endian float32 on every supported platform
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!out) raise(ErrorCode::IoFailure, "short write on checkpoint: " + path);
}

VqGenerator load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoFailure, "cannot open checkpoint: " + path);
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
        raise(ErrorCode::DecodeFailure, "not a checkpoint file: " + path);
    }
    char len_le[8];
    if (!in.read(len_le, 8)) raise(ErrorCode::DecodeFailure, "truncated checkpoint header");
    uint64_t len = 0;
    for (int i = 0; i < 8; ++i) len |= static_cast<uint64_t>(static_cast<unsigned char>(len_le[i])) << (8 * i);
    std::string header_str(len, '\0');
    if (!in.read(header_str.data(), static_cast<std::streamsize>(len))) {
        raise(ErrorCode::DecodeFailure, "truncated checkpoint header");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_str);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::DecodeFailure, std::string("bad checkpoint header: ") + e.what());
    }

    const GeneratorConfig config = config_from_json(header.at("config"));
    Rng init_rng(config.seed);
    VqGenerator gen(config, init_rng);

    std::vector<float> payload;
    {
        std::vector<char> rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        payload.resize(rest.size() / sizeof(float));
        std::memcpy(payload.data(), rest.data(), payload.size() * sizeof(float));
    }

    std::map<std::string, Tensor> adam_m = gen.adam_m();
    std::map<std::string, Tensor> adam_v = gen.adam_v();
    for (const auto& entry : header.at("tensors")) {
        const std::string name = entry.at("name").get<std::string>();
        const size_t offset = entry.at("offset").get<size_t>();
        const size_t count = entry.at("count").get<size_t>();
        if (offset + count > payload.size()) {
            raise(ErrorCode::DecodeFailure, "checkpoint payload out of range for " + name);
        }
        std::vector<double> values(count);
        for (size_t i = 0; i < count; ++i) values[i] = payload[offset + i];
        if (name.rfind("param:", 0) == 0) {
            gen.set_parameter(name.substr(6), std::move(values));
        } else if (name.rfind("adam_m:", 0) == 0) {
            adam_m.at(name.substr(7)).values = std::move(values);
        } else if (name.rfind("adam_v:", 0) == 0) {
            adam_v.at(name.substr(7)).values = std::move(values);
        }
    }
    gen.restore_optimizer(header.at("adam_t").get<int64_t>(), std::move(adam_m), std::move(adam_v));
    return gen;
}

}  // namespace varigen::vq
