#include "graphdis/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "graphdis/dataset_io.hpp"
#include "graphdis/error.hpp"

namespace graphdis {

namespace {

constexpr char kMagic[8] = {'G', 'D', 'V', 'A', 'E', 'C', 'K', 'P'};

std::uint64_t fnv1a(const char* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.append(bytes, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <class T>
  T get_le() {
    char raw[sizeof(T)];
    take(raw, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(raw, raw + sizeof(T));
    }
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  void take(char* dst, std::size_t n) {
    if (n > bytes_.size() - pos_) throw FormatError("checkpoint is truncated");
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::size_t position() const { return pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::ordered_json config_to_json(const TrainConfig& cfg) {
  nlohmann::ordered_json model;
  model["j_latent"] = cfg.model.j_latent;
  model["n_max"] = cfg.model.n_max;
  model["gcn_layers"] = cfg.model.gcn_layers;
  model["encoder_dense_layers"] = cfg.model.encoder_dense_layers;
  model["dense_decoder_layers"] = cfg.model.dense_decoder_layers;
  model["param_dim"] = cfg.model.param_dim;
  model["use_attributes"] = cfg.model.use_attributes;

  nlohmann::ordered_json j;
  j["beta"] = cfg.beta;
  j["lambda_param"] = cfg.lambda_param;
  j["attr_weight"] = cfg.attr_weight;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["seed"] = cfg.seed;
  j["family"] = cfg.family;
  j["factor_names"] = cfg.factor_names;
  j["factor_lo"] = cfg.factor_lo;
  j["factor_hi"] = cfg.factor_hi;
  j["model"] = std::move(model);
  return j;
}

TrainConfig config_from_json(const nlohmann::json& j) {
  try {
    TrainConfig cfg;
    const auto& m = j.at("model");
    cfg.model.j_latent = m.at("j_latent").get<int>();
    cfg.model.n_max = m.at("n_max").get<int>();
    cfg.model.gcn_layers = m.at("gcn_layers").get<std::vector<int>>();
    cfg.model.encoder_dense_layers = m.at("encoder_dense_layers").get<std::vector<int>>();
    cfg.model.dense_decoder_layers = m.at("dense_decoder_layers").get<std::vector<int>>();
    cfg.model.param_dim = m.at("param_dim").get<int>();
    cfg.model.use_attributes = m.at("use_attributes").get<bool>();
    cfg.beta = j.at("beta").get<double>();
    cfg.lambda_param = j.at("lambda_param").get<double>();
    cfg.attr_weight = j.at("attr_weight").get<double>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.adam_beta1 = j.at("adam_beta1").get<double>();
    cfg.adam_beta2 = j.at("adam_beta2").get<double>();
    cfg.adam_eps = j.at("adam_eps").get<double>();
    cfg.seed = j.at("seed").get<Seed>();
    cfg.family = j.at("family").get<std::string>();
    cfg.factor_names = j.at("factor_names").get<std::vector<std::string>>();
    cfg.factor_lo = j.at("factor_lo").get<std::vector<double>>();
    cfg.factor_hi = j.at("factor_hi").get<std::vector<double>>();
    validate(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed training configuration: ") + e.what());
  } catch (const ValidationError& e) {
    throw FormatError(std::string("invalid training configuration: ") + e.what());
  }
}

std::string serialize_checkpoint(const ParamStore& weights, const TrainConfig& cfg) {
  nlohmann::ordered_json header;
  header["format_version"] = kCheckpointVersion;
  header["config"] = config_to_json(cfg);
  header["step"] = weights.step();
  nlohmann::ordered_json params = nlohmann::ordered_json::array();
  for (const auto& [name, p] : weights) {
    params.push_back({{"name", name}, {"shape", p.value.shape()}});
  }
  header["params"] = std::move(params);
  const std::string text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& [name, p] : weights) {
    for (double v : p.value.values()) put_le<double>(out, v);
  }
  put_le<std::uint64_t>(out, fnv1a(out.data(), out.size()));
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader in(bytes);
  char magic[sizeof(kMagic)];
  in.take(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  const auto version = in.get_le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) +
                      " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() < sizeof(std::uint64_t) + sizeof(kMagic) + sizeof(std::uint32_t)) {
    throw FormatError("checkpoint is truncated");
  }
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  {
    Reader tail(bytes);
    std::string skip(body, '\0');
    tail.take(skip.data(), body);
    const auto stored = tail.get_le<std::uint64_t>();
    if (stored != fnv1a(bytes.data(), body)) {
      throw FormatError("checkpoint checksum mismatch (file is corrupt or truncated)");
    }
  }
  const auto header_len = in.get_le<std::uint64_t>();
  if (header_len > body - in.position()) throw FormatError("checkpoint is truncated");
  std::string text(static_cast<std::size_t>(header_len), '\0');
  in.take(text.data(), text.size());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt checkpoint header: ") + e.what());
  }
  if (header.value("format_version", 0u) != kCheckpointVersion) {
    throw FormatError("checkpoint header version mismatch");
  }
  Checkpoint ck;
  ck.config = config_from_json(header.at("config"));
  try {
    for (const auto& entry : header.at("params")) {
      Tensor t(entry.at("shape").get<Shape>());
      if (t.size() * sizeof(double) > body - in.position()) {
        throw FormatError("checkpoint is truncated");
      }
      for (double& v : t.values()) v = in.get_le<double>();
      ck.weights.add(entry.at("name").get<std::string>(), std::move(t));
    }
    ck.weights.set_step(header.at("step").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt checkpoint header: ") + e.what());
  }
  if (in.position() != body) throw FormatError("checkpoint has trailing bytes");

  const ParamStore reference = init_params(ck.config.model, 0);
  if (reference.size() != ck.weights.size()) {
    throw FormatError("checkpoint parameters do not match its model configuration");
  }
  for (const auto& [name, p] : reference) {
    if (!ck.weights.contains(name) || ck.weights.at(name).value.shape() != p.value.shape()) {
      throw FormatError("checkpoint parameter " + name + " missing or misshapen");
    }
  }
  return ck;
}

void save_checkpoint(const ParamStore& weights, const TrainConfig& cfg,
                     const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(weights, cfg));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path));
}

}  // namespace graphdis
