// Copyright (c) 2026 The icc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "icclab/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "icclab/error.hpp"

namespace icclab {

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
  throw Error(ErrorCode::kConfigError, (pointer.empty() ? "/" : pointer) + ": " + what);
}

std::string escape_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// Typed access to the members of one JSON object.
class Reader {
 public:
  Reader(const Json& j, std::string pointer, std::initializer_list<const char*> allowed)
      : j_(j), pointer_(std::move(pointer)) {
    if (!j.is_object()) fail(pointer_, "expected an object");
    for (const auto& [key, value] : j.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(child(key), "unknown key");
    }
  }

  std::string child(std::string_view key) const { return pointer_ + "/" + escape_token(key); }
  const std::string& pointer() const { return pointer_; }
  bool has(const char* key) const { return j_.contains(key); }
  const Json& at(const char* key) const { return j_.at(key); }

  void number(const char* key, double* out) const {
    if (!has(key)) return;
    const Json& v = at(key);
    if (!v.is_number()) fail(child(key), "expected a number");
    *out = v.get<double>();
    if (!std::isfinite(*out)) fail(child(key), "expected a finite number");
  }

  void count(const char* key, std::size_t* out) const {
    if (!has(key)) return;
    *out = read_count(at(key), child(key));
  }

  void seed(const char* key, std::uint64_t* out) const {
    if (!has(key)) return;
    *out = read_u64(at(key), child(key));
  }

  void boolean(const char* key, bool* out) const {
    if (!has(key)) return;
    const Json& v = at(key);
    if (!v.is_boolean()) fail(child(key), "expected true or false");
    *out = v.get<bool>();
  }

  void numbers(const char* key, std::vector<double>* out) const {
    if (!has(key)) return;
    const Json& v = at(key);
    if (!v.is_array()) fail(child(key), "expected an array of numbers");
    out->clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(child(key) + "/" + std::to_string(i), "expected a number");
      out->push_back(v[i].get<double>());
    }
  }

  static std::uint64_t read_u64(const Json& v, const std::string& pointer) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(pointer, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  static std::size_t read_count(const Json& v, const std::string& pointer) {
    return static_cast<std::size_t>(read_u64(v, pointer));
  }

 private:
  const Json& j_;
  std::string pointer_;
};

// Re-raises a validation error of a nested object under its pointer.
template <typename F>
void validated(const std::string& pointer, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConfigError) throw;
    if (e.detail().starts_with("/")) throw Error(ErrorCode::kConfigError, pointer + e.detail());
    fail(pointer, e.detail());
  }
}

Json axis_json(const Axis& a) { return {{"start", a.start}, {"stop", a.stop}, {"step", a.step}}; }

Axis parse_axis(const Json& j, const std::string& pointer, Axis axis) {
  Reader r(j, pointer, {"start", "stop", "step"});
  r.number("start", &axis.start);
  r.number("stop", &axis.stop);
  r.number("step", &axis.step);
  return axis;
}

LossKind parse_kind(const Json& v, const std::string& pointer) {
  if (!v.is_string()) fail(pointer, "expected a loss name");
  try {
    return parse_loss_kind(v.get<std::string>());
  } catch (const Error& e) {
    fail(pointer, e.detail());
  }
}

}  // namespace

Json to_json(const GridConfig& c) {
  return {{"intra_axis", axis_json(c.intra)},
          {"inter_axis", axis_json(c.inter)},
          {"dims", c.dims},
          {"n_classes", c.n_classes},
          {"n_samples_total", c.n_samples_total},
          {"n_repeats", c.n_repeats},
          {"seed", c.seed}};
}

Json to_json(const LossSpec& c) {
  return {{"kind", std::string(loss_kind_name(c.kind))},
          {"contrastive", std::string(loss_kind_name(c.contrastive))},
          {"alpha", c.alpha},
          {"lambda", c.lambda},
          {"w", c.w},
          {"b", c.b},
          {"temperature", c.temperature}};
}

Json to_json(const SvmConfig& c) {
  return {{"reg_strength", c.reg_strength},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"train_fraction", c.train_fraction},
          {"seed", c.seed}};
}

Json to_json(const ToyDataConfig& c) {
  return {{"input_dim", c.input_dim},
          {"n_classes", c.n_classes},
          {"n_train_classes", c.n_train_classes},
          {"samples_per_class", c.samples_per_class},
          {"signal_scale", c.signal_scale},
          {"nuisance_dim", c.nuisance_dim},
          {"nuisance_scale", c.nuisance_scale},
          {"noise_scale", c.noise_scale},
          {"seed", c.seed}};
}

Json to_json(const EncoderConfig& c) {
  return {{"layer_widths", c.layer_widths},
          {"activation", c.activation == Activation::kRelu ? "relu" : "tanh"}};
}

Json to_json(const TrainConfig& c) {
  return {{"loss", to_json(c.loss)},
          {"batch_classes", c.batch_classes},
          {"batch_samples_per_class", c.batch_samples_per_class},
          {"steps", c.steps},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed},
          {"lambda_grid", c.lambda_grid}};
}

Json to_json(const EvalConfig& c) {
  return {{"n_trials", c.n_trials},
          {"seed", c.seed},
          {"p_target", c.dcf.p_target},
          {"c_miss", c.dcf.c_miss},
          {"c_fa", c.dcf.c_fa}};
}

Json to_json(const ExperimentConfig& c) {
  Json starts = Json::array();
  for (const auto& s : c.paths.starts) starts.push_back({s[0], s[1]});
  Json kinds = Json::array();
  for (LossKind k : c.toy.kinds) kinds.push_back(std::string(loss_kind_name(k)));
  return {{"grid", to_json(c.grid)},
          {"loss", to_json(c.loss)},
          {"svm", to_json(c.svm)},
          {"sweep", {{"lambdas", c.sweep.lambdas}, {"shared_batches", c.sweep.shared_batches}}},
          {"paths", {{"starts", starts}, {"step", c.paths.step}, {"max_steps", c.paths.max_steps}}},
          {"toy",
           {{"data", to_json(c.toy.data)},
            {"encoder", to_json(c.toy.encoder)},
            {"train", to_json(c.toy.train)},
            {"eval", to_json(c.toy.eval)},
            {"seeds", c.toy.seeds},
            {"kinds", kinds}}}};
}

GridConfig parse_grid_config(const Json& j, const std::string& pointer) {
  GridConfig c;
  Reader r(j, pointer, {"intra_axis", "inter_axis", "dims", "n_classes", "n_samples_total",
                        "n_repeats", "seed"});
  if (r.has("intra_axis")) c.intra = parse_axis(r.at("intra_axis"), r.child("intra_axis"), c.intra);
  if (r.has("inter_axis")) c.inter = parse_axis(r.at("inter_axis"), r.child("inter_axis"), c.inter);
  r.count("dims", &c.dims);
  r.count("n_classes", &c.n_classes);
  r.count("n_samples_total", &c.n_samples_total);
  r.count("n_repeats", &c.n_repeats);
  r.seed("seed", &c.seed);
  validated(pointer, [&] { validate(c); });
  return c;
}

LossSpec parse_loss_spec(const Json& j, const std::string& pointer) {
  LossSpec c;
  Reader r(j, pointer, {"kind", "contrastive", "alpha", "lambda", "w", "b", "temperature"});
  if (r.has("kind")) c.kind = parse_kind(r.at("kind"), r.child("kind"));
  if (r.has("contrastive")) c.contrastive = parse_kind(r.at("contrastive"), r.child("contrastive"));
  r.number("alpha", &c.alpha);
  r.number("lambda", &c.lambda);
  r.number("w", &c.w);
  r.number("b", &c.b);
  r.number("temperature", &c.temperature);
  validated(pointer, [&] { validate(c); });
  return c;
}

SvmConfig parse_svm_config(const Json& j, const std::string& pointer) {
  SvmConfig c;
  Reader r(j, pointer, {"reg_strength", "epochs", "learning_rate", "train_fraction", "seed"});
  r.number("reg_strength", &c.reg_strength);
  r.count("epochs", &c.epochs);
  r.number("learning_rate", &c.learning_rate);
  r.number("train_fraction", &c.train_fraction);
  r.seed("seed", &c.seed);
  validated(pointer, [&] { validate(c); });
  return c;
}

ToyDataConfig parse_toy_data_config(const Json& j, const std::string& pointer) {
  ToyDataConfig c;
  Reader r(j, pointer, {"input_dim", "n_classes", "n_train_classes", "samples_per_class",
                        "signal_scale", "nuisance_dim", "nuisance_scale", "noise_scale", "seed"});
  r.count("input_dim", &c.input_dim);
  r.count("n_classes", &c.n_classes);
  r.count("n_train_classes", &c.n_train_classes);
  r.count("samples_per_class", &c.samples_per_class);
  r.number("signal_scale", &c.signal_scale);
  r.count("nuisance_dim", &c.nuisance_dim);
  r.number("nuisance_scale", &c.nuisance_scale);
  r.number("noise_scale", &c.noise_scale);
  r.seed("seed", &c.seed);
  validated(pointer, [&] { validate(c); });
  return c;
}

EncoderConfig parse_encoder_config(const Json& j, const std::string& pointer) {
  EncoderConfig c;
  Reader r(j, pointer, {"layer_widths", "activation"});
  if (r.has("layer_widths")) {
    const Json& v = r.at("layer_widths");
    if (!v.is_array()) fail(r.child("layer_widths"), "expected an array of widths");
    c.layer_widths.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      c.layer_widths.push_back(Reader::read_count(v[i], r.child("layer_widths") + "/" + std::to_string(i)));
    }
  }
  if (r.has("activation")) {
    const Json& v = r.at("activation");
    const std::string name = v.is_string() ? v.get<std::string>() : "";
    if (name == "relu") {
      c.activation = Activation::kRelu;
    } else if (name == "tanh") {
      c.activation = Activation::kTanh;
    } else {
      fail(r.child("activation"), "expected \"relu\" or \"tanh\"");
    }
  }
  validated(pointer, [&] { validate(c); });
  return c;
}

TrainConfig parse_train_config(const Json& j, const ToyDataConfig& data,
                               const std::string& pointer) {
  TrainConfig c;
  Reader r(j, pointer, {"loss", "batch_classes", "batch_samples_per_class", "steps",
                        "learning_rate", "seed", "lambda_grid"});
  if (r.has("loss")) c.loss = parse_loss_spec(r.at("loss"), r.child("loss"));
  r.count("batch_classes", &c.batch_classes);
  r.count("batch_samples_per_class", &c.batch_samples_per_class);
  r.count("steps", &c.steps);
  r.number("learning_rate", &c.learning_rate);
  r.seed("seed", &c.seed);
  r.numbers("lambda_grid", &c.lambda_grid);
  validated(pointer, [&] { validate(c, data); });
  return c;
}

EvalConfig parse_eval_config(const Json& j, const std::string& pointer) {
  EvalConfig c;
  Reader r(j, pointer, {"n_trials", "seed", "p_target", "c_miss", "c_fa"});
  r.count("n_trials", &c.n_trials);
  r.seed("seed", &c.seed);
  r.number("p_target", &c.dcf.p_target);
  r.number("c_miss", &c.dcf.c_miss);
  r.number("c_fa", &c.dcf.c_fa);
  if (c.n_trials < 2) fail(r.child("n_trials"), "needs at least two trials");
  if (!(c.dcf.p_target > 0.0 && c.dcf.p_target < 1.0)) fail(r.child("p_target"), "must lie in (0, 1)");
  if (!(c.dcf.c_miss > 0.0)) fail(r.child("c_miss"), "must be positive");
  if (!(c.dcf.c_fa > 0.0)) fail(r.child("c_fa"), "must be positive");
  return c;
}

ExperimentConfig parse_experiment(const Json& j) {
  ExperimentConfig c;
  Reader r(j, "", {"grid", "loss", "svm", "sweep", "paths", "toy"});
  if (r.has("grid")) c.grid = parse_grid_config(r.at("grid"), "/grid");
  if (r.has("loss")) c.loss = parse_loss_spec(r.at("loss"), "/loss");
  if (r.has("svm")) c.svm = parse_svm_config(r.at("svm"), "/svm");
  if (r.has("sweep")) {
    Reader s(r.at("sweep"), "/sweep", {"lambdas", "shared_batches"});
    s.numbers("lambdas", &c.sweep.lambdas);
    s.boolean("shared_batches", &c.sweep.shared_batches);
    for (std::size_t k = 0; k < c.sweep.lambdas.size(); ++k) {
      const double l = c.sweep.lambdas[k];
      if (!(l >= 0.0 && l <= 1.0)) fail("/sweep/lambdas/" + std::to_string(k), "must lie in [0, 1]");
    }
  }
  if (r.has("paths")) {
    Reader p(r.at("paths"), "/paths", {"starts", "step", "max_steps"});
    if (p.has("starts")) {
      const Json& v = p.at("starts");
      if (!v.is_array()) fail("/paths/starts", "expected an array of [intra, inter] pairs");
      c.paths.starts.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string ptr = "/paths/starts/" + std::to_string(i);
        if (!v[i].is_array() || v[i].size() != 2 || !v[i][0].is_number() || !v[i][1].is_number()) {
          fail(ptr, "expected [intra, inter]");
        }
        c.paths.starts.push_back({v[i][0].get<double>(), v[i][1].get<double>()});
      }
    }
    p.number("step", &c.paths.step);
    p.count("max_steps", &c.paths.max_steps);
    if (c.paths.step < 0.0) fail("/paths/step", "must be non-negative");
  }
  if (r.has("toy")) {
    Reader t(r.at("toy"), "/toy", {"data", "encoder", "train", "eval", "seeds", "kinds"});
    if (t.has("data")) c.toy.data = parse_toy_data_config(t.at("data"), "/toy/data");
    if (t.has("encoder")) c.toy.encoder = parse_encoder_config(t.at("encoder"), "/toy/encoder");
    if (t.has("train")) c.toy.train = parse_train_config(t.at("train"), c.toy.data, "/toy/train");
    if (t.has("eval")) c.toy.eval = parse_eval_config(t.at("eval"), "/toy/eval");
    if (t.has("seeds")) {
      const Json& v = t.at("seeds");
      if (!v.is_array() || v.empty()) fail("/toy/seeds", "expected a non-empty array of seeds");
      c.toy.seeds.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        c.toy.seeds.push_back(Reader::read_u64(v[i], "/toy/seeds/" + std::to_string(i)));
      }
    }
    if (t.has("kinds")) {
      const Json& v = t.at("kinds");
      if (!v.is_array() || v.empty()) fail("/toy/kinds", "expected a non-empty array of loss names");
      c.toy.kinds.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string ptr = "/toy/kinds/" + std::to_string(i);
        const LossKind k = parse_kind(v[i], ptr);
        if (k != LossKind::kGe2e && k != LossKind::kAngleProto && k != LossKind::kSupCon) {
          fail(ptr, "must be a contrastive loss");
        }
        c.toy.kinds.push_back(k);
      }
    }
    if (c.toy.encoder.layer_widths.front() != c.toy.data.input_dim) {
      fail("/toy/encoder/layer_widths/0", "must equal /toy/data/input_dim");
    }
  }
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot read " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  Json j;
  try {
    j = Json::parse(text.str());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return parse_experiment(j);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_digest(const Json& j) { return fnv1a_hex(j.dump()); }

}  // namespace icclab
