#include <sstream>

#include "af/engines.hpp"

namespace af::engines {

const char* part_name(int label) {
  static const char* names[kNumParts] = {"background", "skin",  "hair", "eyes",
                                         "mouth",      "nose", "brow", "glasses"};
  return (label >= 0 && label < kNumParts) ? names[label] : "?";
}

const AttributeDef* EngineSchema::find(const std::string& attr) const {
  for (const auto& a : attributes)
    if (a.name == attr) return &a;
  return nullptr;
}

int EngineSchema::discrete_count() const {
  int n = 0;
  for (const auto& a : attributes) n += a.kind == AttrKind::kDiscrete;
  return n;
}

int EngineSchema::continuous_count() const {
  int n = 0;
  for (const auto& a : attributes) n += a.kind == AttrKind::kContinuous;
  return n;
}

const EngineSchema& builtin_schema(const std::string& name) {
  static const EngineSchema engine_a = {
      "engine-a",
      {
          {"skin_tone", AttrKind::kDiscrete, 8, false},
          {"hair_type", AttrKind::kDiscrete, 12, false},
          {"hair_color", AttrKind::kDiscrete, 6, false},
          {"glasses", AttrKind::kDiscrete, 2, true},
          {"head_width", AttrKind::kContinuous, 1, false},
          {"head_length", AttrKind::kContinuous, 1, false},
          {"eye_size", AttrKind::kContinuous, 1, false},
          {"mouth_width", AttrKind::kContinuous, 1, false},
      }};
  static const EngineSchema engine_b = {
      "engine-b",
      {
          {"head_type", AttrKind::kDiscrete, 6, false},
          {"skin_tone", AttrKind::kDiscrete, 8, false},
          {"hair_type", AttrKind::kDiscrete, 22, false},
          {"hair_color", AttrKind::kDiscrete, 7, false},
          {"brow_type", AttrKind::kDiscrete, 5, false},
          {"glasses", AttrKind::kDiscrete, 1, true},
      }};
  if (name == "engine-a") return engine_a;
  if (name == "engine-b") return engine_b;
  throw std::out_of_range("unknown builtin engine: " + name);
}

bool schema_valid(const EngineSchema& s, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (s.name.empty()) return fail("schema name empty");
  int discrete = 0;
  for (size_t i = 0; i < s.attributes.size(); ++i) {
    const auto& a = s.attributes[i];
    if (a.name.empty()) return fail("attribute name empty");
    for (size_t j = 0; j < i; ++j)
      if (s.attributes[j].name == a.name) return fail("duplicate attribute: " + a.name);
    if (a.kind == AttrKind::kDiscrete) {
      ++discrete;
      if (a.cardinality < 1) return fail("cardinality < 1: " + a.name);
    } else if (a.optional) {
      return fail("continuous attribute cannot be optional: " + a.name);
    }
  }
  if (discrete == 0) return fail("schema needs at least one discrete attribute");
  return true;
}

std::string schema_to_text(const EngineSchema& s) {
  std::ostringstream os;
  os << "# avatarforge engine schema v1\n";
  os << "name " << s.name << "\n";
  for (const auto& a : s.attributes) {
    os << "attribute " << a.name << ' ';
    if (a.kind == AttrKind::kContinuous) {
      os << "continuous";
    } else {
      os << "discrete " << a.cardinality;
      if (a.optional) os << " optional";
    }
    os << "\n";
  }
  return os.str();
}

EngineSchema schema_from_text(const std::string& text) {
  EngineSchema s;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "name") {
      ls >> s.name;
    } else if (key == "attribute") {
      AttributeDef a;
      std::string kind;
      ls >> a.name >> kind;
      if (kind == "continuous") {
        a.kind = AttrKind::kContinuous;
      } else if (kind == "discrete") {
        a.kind = AttrKind::kDiscrete;
        ls >> a.cardinality;
        std::string opt;
        if (ls >> opt && opt == "optional") a.optional = true;
      } else {
        throw std::runtime_error("schema: unknown attribute kind: " + kind);
      }
      s.attributes.push_back(std::move(a));
    } else {
      throw std::runtime_error("schema: unknown directive: " + key);
    }
  }
  std::string why;
  if (!schema_valid(s, &why)) throw std::runtime_error("schema: invalid: " + why);
  return s;
}

std::vector<std::string> validate_vector(const EngineSchema& s, const AvatarVector& v) {
  std::vector<std::string> problems;
  for (const auto& a : s.attributes) {
    if (a.kind == AttrKind::kContinuous) {
      auto it = v.continuous.find(a.name);
      if (it == v.continuous.end()) {
        problems.push_back(a.name + ": missing");
      } else if (!(it->second >= 0.0 && it->second <= 1.0)) {
        problems.push_back(a.name + ": out of range [0,1]");
      }
    } else {
      auto it = v.discrete.find(a.name);
      if (it == v.discrete.end()) {
        problems.push_back(a.name + ": missing");
      } else if (it->second == kAbsent) {
        if (!a.optional) problems.push_back(a.name + ": absent but not optional");
      } else if (it->second < 0 || it->second >= a.cardinality) {
        problems.push_back(a.name + ": index out of cardinality");
      }
    }
  }
  for (const auto& [k, _] : v.continuous) {
    const AttributeDef* a = s.find(k);
    if (!a || a->kind != AttrKind::kContinuous) problems.push_back(k + ": unknown continuous attribute");
  }
  for (const auto& [k, _] : v.discrete) {
    const AttributeDef* a = s.find(k);
    if (!a || a->kind != AttrKind::kDiscrete) problems.push_back(k + ": unknown discrete attribute");
  }
  return problems;
}

void validate_or_throw(const EngineSchema& s, const AvatarVector& v) {
  auto problems = validate_vector(s, v);
  if (problems.empty()) return;
  std::string what = "invalid avatar vector for " + s.name + ":";
  for (const auto& p : problems) what += " [" + p + "]";
  throw ValidationError(what, std::move(problems));
}

AvatarVector sample_vector(const EngineSchema& s, uint64_t seed) {
  Rng rng(seed);
  AvatarVector v;
  for (const auto& a : s.attributes) {
    if (a.kind == AttrKind::kContinuous) {
      v.continuous[a.name] = rng.uniform();
    } else if (a.optional && rng.bernoulli(0.5)) {
      v.discrete[a.name] = kAbsent;
    } else {
      v.discrete[a.name] = rng.uniform_int(a.cardinality);
    }
  }
  return v;
}

nlohmann::json vector_to_json(const AvatarVector& v) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, val] : v.continuous) j[k] = val;
  for (const auto& [k, idx] : v.discrete) {
    if (idx == kAbsent)
      j[k] = nullptr;
    else
      j[k] = idx;
  }
  return j;
}

AvatarVector vector_from_json(const nlohmann::json& j) {
  AvatarVector v;
  for (const auto& [k, val] : j.items()) {
    if (val.is_null())
      v.discrete[k] = kAbsent;
    else if (val.is_number_integer())
      v.discrete[k] = val.get<int>();
    else
      v.continuous[k] = val.get<double>();
  }
  return v;
}

}  // namespace af::engines
