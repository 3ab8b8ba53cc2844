// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/trace.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tmig {

using ojson = nlohmann::ordered_json;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::DanglingTensorRef: return "DanglingTensorRef";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NoBeneficialCandidate: return "NoBeneficialCandidate";
    case ErrorCode::CapacityViolation: return "CapacityViolation";
    case ErrorCode::InconsistentPlan: return "InconsistentPlan";
    case ErrorCode::ProgramInconsistent: return "ProgramInconsistent";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(TensorKind kind) {
  switch (kind) {
    case TensorKind::Global: return "global";
    case TensorKind::Intermediate: return "intermediate";
    case TensorKind::Unspecified: return "unspecified";
  }
  return "unspecified";
}

namespace {

void sort_unique(std::vector<TensorId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

}  // namespace

WorkloadTrace::WorkloadTrace(std::vector<TensorDescriptor> tensors,
                             std::vector<KernelRecord> kernels,
                             std::map<std::string, std::string> metadata)
    : tensors_(std::move(tensors)), kernels_(std::move(kernels)), metadata_(std::move(metadata)) {
  std::sort(tensors_.begin(), tensors_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (i > 0 && tensors_[i].id == tensors_[i - 1].id) {
      throw Error(ErrorCode::DuplicateId, "tensor id " + std::to_string(tensors_[i].id));
    }
    if (tensors_[i].size_bytes <= 0) {
      throw Error(ErrorCode::NonPositiveValue,
                  "tensor " + std::to_string(tensors_[i].id) + " has size_bytes <= 0");
    }
  }
  for (std::size_t k = 0; k < kernels_.size(); ++k) {
    auto& kr = kernels_[k];
    if (kr.index != static_cast<int>(k)) {
      if (std::any_of(kernels_.begin(), kernels_.begin() + static_cast<std::ptrdiff_t>(k),
                      [&](const auto& o) { return o.index == kr.index; })) {
        throw Error(ErrorCode::DuplicateId, "kernel index " + std::to_string(kr.index));
      }
      throw Error(ErrorCode::MalformedInput,
                  "kernel indices must be 0..n-1 in execution order; got " +
                      std::to_string(kr.index) + " at position " + std::to_string(k));
    }
    if (kr.duration_us <= 0) {
      throw Error(ErrorCode::NonPositiveValue,
                  "kernel " + std::to_string(kr.index) + " has duration_us <= 0");
    }
    sort_unique(kr.inputs);
    sort_unique(kr.outputs);
    if (kr.inputs.empty() && kr.outputs.empty()) {
      throw Error(ErrorCode::MalformedInput,
                  "kernel " + std::to_string(kr.index) + " touches no tensors");
    }
    for (const auto* ids : {&kr.inputs, &kr.outputs}) {
      for (TensorId id : *ids) {
        if (!has_tensor(id)) {
          throw Error(ErrorCode::DanglingTensorRef, "kernel " + std::to_string(kr.index) +
                                                        " references unknown tensor " +
                                                        std::to_string(id));
        }
      }
    }
  }
}

bool WorkloadTrace::has_tensor(TensorId id) const {
  auto it = std::lower_bound(tensors_.begin(), tensors_.end(), id,
                             [](const TensorDescriptor& t, TensorId v) { return t.id < v; });
  return it != tensors_.end() && it->id == id;
}

std::size_t WorkloadTrace::tensor_slot(TensorId id) const {
  auto it = std::lower_bound(tensors_.begin(), tensors_.end(), id,
                             [](const TensorDescriptor& t, TensorId v) { return t.id < v; });
  if (it == tensors_.end() || it->id != id) {
    throw Error(ErrorCode::DanglingTensorRef, "unknown tensor " + std::to_string(id));
  }
  return static_cast<std::size_t>(it - tensors_.begin());
}

const TensorDescriptor& WorkloadTrace::tensor(TensorId id) const {
  return tensors_[tensor_slot(id)];
}

Micros WorkloadTrace::total_duration() const {
  Micros sum = 0;
  for (const auto& k : kernels_) sum += k.duration_us;
  return sum;
}

Bytes WorkloadTrace::total_tensor_bytes() const {
  Bytes sum = 0;
  for (const auto& t : tensors_) sum += t.size_bytes;
  return sum;
}

WorkloadTrace WorkloadTrace::with_durations(const std::vector<Micros>& durations) const {
  if (durations.size() != kernels_.size()) {
    throw Error(ErrorCode::InvalidParams, "duration count does not match kernel count");
  }
  auto kernels = kernels_;
  for (std::size_t i = 0; i < kernels.size(); ++i) kernels[i].duration_us = durations[i];
  return WorkloadTrace(tensors_, std::move(kernels), metadata_);
}

namespace {

template <typename T>
T required(const ojson& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::MalformedInput, std::string(where) + " is missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedInput,
                std::string(where) + " field '" + key + "' has the wrong type");
  }
}

std::vector<TensorId> id_list(const ojson& obj, const char* key, const char* where) {
  const auto& arr = obj.contains(key) ? obj.at(key) : ojson::array();
  if (!arr.is_array()) {
    throw Error(ErrorCode::MalformedInput, std::string(where) + " field '" + key + "' is not a list");
  }
  std::vector<TensorId> out;
  for (const auto& v : arr) {
    if (!v.is_number_integer()) {
      throw Error(ErrorCode::MalformedInput, std::string(where) + " has a non-integer tensor id");
    }
    out.push_back(v.get<TensorId>());
  }
  return out;
}

}  // namespace

WorkloadTrace parse_trace(std::string_view raw) {
  ojson doc;
  try {
    doc = ojson::parse(raw.begin(), raw.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedInput, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedInput, "trace root is not an object");
  if (!doc.contains("tensors") || !doc["tensors"].is_array()) {
    throw Error(ErrorCode::MalformedInput, "missing 'tensors' list");
  }
  if (!doc.contains("kernels") || !doc["kernels"].is_array()) {
    throw Error(ErrorCode::MalformedInput, "missing 'kernels' list");
  }

  std::vector<TensorDescriptor> tensors;
  for (const auto& t : doc["tensors"]) {
    TensorDescriptor d;
    d.id = required<TensorId>(t, "id", "tensor");
    d.size_bytes = required<Bytes>(t, "size_bytes", "tensor");
    if (t.contains("kind") && !t["kind"].is_null()) {
      if (!t["kind"].is_string()) throw Error(ErrorCode::MalformedInput, "tensor kind must be a string");
      const auto kind = t["kind"].get<std::string>();
      if (kind == "global") {
        d.kind = TensorKind::Global;
      } else if (kind == "intermediate") {
        d.kind = TensorKind::Intermediate;
      } else {
        throw Error(ErrorCode::MalformedInput, "unknown tensor kind '" + kind + "'");
      }
    }
    tensors.push_back(d);
  }

  std::vector<KernelRecord> kernels;
  for (const auto& k : doc["kernels"]) {
    KernelRecord r;
    r.index = required<int>(k, "index", "kernel");
    r.name = required<std::string>(k, "name", "kernel");
    r.duration_us = required<Micros>(k, "duration_us", "kernel");
    r.inputs = id_list(k, "inputs", "kernel");
    r.outputs = id_list(k, "outputs", "kernel");
    kernels.push_back(std::move(r));
  }

  std::map<std::string, std::string> metadata;
  if (doc.contains("metadata")) {
    const auto& m = doc["metadata"];
    if (!m.is_object()) throw Error(ErrorCode::MalformedInput, "'metadata' is not an object");
    for (const auto& [key, value] : m.items()) {
      metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  return WorkloadTrace(std::move(tensors), std::move(kernels), std::move(metadata));
}

std::string serialize_trace(const WorkloadTrace& trace) {
  ojson doc;
  doc["tensors"] = ojson::array();
  for (const auto& t : trace.tensors()) {
    ojson e;
    e["id"] = t.id;
    e["size_bytes"] = t.size_bytes;
    if (t.kind == TensorKind::Unspecified) {
      e["kind"] = nullptr;
    } else {
      e["kind"] = std::string(to_string(t.kind));
    }
    doc["tensors"].push_back(std::move(e));
  }
  doc["kernels"] = ojson::array();
  for (const auto& k : trace.kernels()) {
    ojson e;
    e["index"] = k.index;
    e["name"] = k.name;
    e["duration_us"] = k.duration_us;
    e["inputs"] = k.inputs;
    e["outputs"] = k.outputs;
    doc["kernels"].push_back(std::move(e));
  }
  doc["metadata"] = ojson::object();
  for (const auto& [key, value] : trace.metadata()) doc["metadata"][key] = value;
  return doc.dump(1) + "\n";
}

WorkloadTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open trace '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

WorkloadTrace synthesize_trace(const SynthParams& p) {
  const auto bad_range = [](const UniformRange& r) { return r.lo <= 0 || r.hi < r.lo; };
  if (p.layers < 1 || bad_range(p.act_size) || bad_range(p.weight_size) ||
      bad_range(p.duration_us)) {
    throw Error(ErrorCode::InvalidParams, "layers must be >= 1 and ranges positive with lo <= hi");
  }
  std::mt19937_64 rng(p.seed);
  const auto draw = [&rng](const UniformRange& r) {
    return std::uniform_int_distribution<std::int64_t>(r.lo, r.hi)(rng);
  };

  const TensorId layers = p.layers;
  const auto weight = [](TensorId i) { return i; };
  const auto act = [layers](TensorId i) { return layers + i; };
  const auto grad = [layers](TensorId i) { return 2 * layers + i; };
  const auto wgrad = [layers](TensorId i) { return 3 * layers + i; };

  std::vector<TensorDescriptor> tensors;
  for (TensorId i = 0; i < layers; ++i) {
    tensors.push_back({weight(i), draw(p.weight_size), TensorKind::Global});
  }
  for (TensorId i = 0; i < layers; ++i) {
    tensors.push_back({act(i), draw(p.act_size), TensorKind::Intermediate});
  }
  for (TensorId i = 0; i < layers; ++i) {
    tensors.push_back({grad(i), tensors[static_cast<std::size_t>(act(i))].size_bytes,
                       TensorKind::Intermediate});
  }
  for (TensorId i = 0; i < layers; ++i) {
    tensors.push_back({wgrad(i), tensors[static_cast<std::size_t>(weight(i))].size_bytes,
                       TensorKind::Intermediate});
  }

  std::vector<KernelRecord> kernels;
  for (TensorId i = 0; i < layers; ++i) {
    KernelRecord k;
    k.index = static_cast<int>(i);
    k.name = "forward_l" + std::to_string(i);
    k.duration_us = draw(p.duration_us);
    k.inputs.push_back(weight(i));
    if (i > 0) k.inputs.push_back(act(i - 1));
    k.outputs.push_back(act(i));
    kernels.push_back(std::move(k));
  }
  for (TensorId i = layers - 1; i >= 0; --i) {
    KernelRecord k;
    k.index = static_cast<int>(2 * layers - 1 - i);
    k.name = "backward_l" + std::to_string(i);
    k.duration_us = draw(p.duration_us);
    k.inputs = {weight(i), act(i)};
    if (i + 1 < layers) k.inputs.push_back(grad(i + 1));
    k.outputs = {grad(i), wgrad(i)};
    kernels.push_back(std::move(k));
  }

  std::map<std::string, std::string> meta{
      {"model", "synthetic"},
      {"layers", std::to_string(p.layers)},
      {"seed", std::to_string(p.seed)},
  };
  return WorkloadTrace(std::move(tensors), std::move(kernels), std::move(meta));
}

}  // namespace tmig
