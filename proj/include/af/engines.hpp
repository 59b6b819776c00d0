#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "af/image.hpp"
#include "af/rng.hpp"
#include "af/tensor.hpp"

namespace af::engines {

// Semantic part labels. The latent code blocks, segmentation classes and
// renderer layers all share this indexing.
enum PartLabel : uint8_t {
  kBackground = 0,
  kSkin = 1,
  kHair = 2,
  kEyes = 3,
  kMouth = 4,
  kNose = 5,
  kBrow = 6,
  kGlasses = 7,
};
constexpr int kNumParts = 8;
const char* part_name(int label);

constexpr int kAbsent = -1;
constexpr int kResolution = 64;

enum class AttrKind { kContinuous, kDiscrete };

struct AttributeDef {
  std::string name;
  AttrKind kind = AttrKind::kDiscrete;
  int cardinality = 1;    // discrete only
  bool optional = false;  // discrete only; adds an implicit "absent" state
};

struct EngineSchema {
  std::string name;
  std::vector<AttributeDef> attributes;  // order defines the vector layout

  const AttributeDef* find(const std::string& attr) const;
  int discrete_count() const;
  int continuous_count() const;
};

/// Engine-interpretable parameter assignment: one entry per schema attribute.
struct AvatarVector {
  std::map<std::string, double> continuous;  // values in [0,1]
  std::map<std::string, int> discrete;       // index in [0,cardinality) or kAbsent

  bool operator==(const AvatarVector&) const = default;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string what, std::vector<std::string> problems)
      : std::runtime_error(std::move(what)), problems(std::move(problems)) {}
  std::vector<std::string> problems;
};

/// Ground truth description of a procedurally rendered realistic face.
struct FaceAttributes {
  int skin_tone = 0;   // realistic skin palette index, 0..7
  int hair_style = 0;  // 0..11, family 0 is bald
  int hair_color = 0;  // 0..5
  bool glasses = false;
  double head_width = 0.5, head_length = 0.5, eye_size = 0.5, mouth_width = 0.5;
};

// ---- schemas ----
const EngineSchema& builtin_schema(const std::string& name);  // "engine-a" | "engine-b"
bool schema_valid(const EngineSchema& s, std::string* why = nullptr);
std::string schema_to_text(const EngineSchema& s);
EngineSchema schema_from_text(const std::string& text);

// ---- vectors ----
std::vector<std::string> validate_vector(const EngineSchema& s, const AvatarVector& v);
void validate_or_throw(const EngineSchema& s, const AvatarVector& v);
AvatarVector sample_vector(const EngineSchema& s, uint64_t seed);
nlohmann::json vector_to_json(const AvatarVector& v);
AvatarVector vector_from_json(const nlohmann::json& j);

// ---- rendering ----
/// Stylized flat render at kResolution. Black-box contract: downstream code
/// gets pixels only, never gradients or internals.
Tensor render_avatar(const EngineSchema& s, const AvatarVector& v);
/// Engine debug output: the same render plus the engine's own part masks.
/// Used as dense ground truth when finetuning the avatar discriminator and
/// by evaluation; never visible to inversion or the estimator.
std::pair<Tensor, SegMap> render_avatar_debug(const EngineSchema& s, const AvatarVector& v);

/// Shaded, softly antialiased render with per-seed lighting tint, background
/// gradient and texture noise. The desk-scale stand-in for photographs.
std::pair<Tensor, SegMap> render_realistic(const FaceAttributes& a, uint64_t seed);

FaceAttributes sample_face_attributes(Rng& rng);

// ---- evaluation oracle ----
/// Best-matching engine values for the attributes a realistic face shares
/// with the given builtin engine. Evaluation-only ground truth; the covered
/// set depends on the engine (total for engine-a).
struct PartialVector {
  std::map<std::string, double> continuous;
  std::map<std::string, int> discrete;
};
PartialVector attribute_oracle(const EngineSchema& s, const FaceAttributes& a);
/// Fill attributes the oracle does not cover with neutral defaults
/// (continuous 0.5, discrete 0) so the result renders.
AvatarVector complete_with_defaults(const EngineSchema& s, const PartialVector& p);

// ---- palettes (shared with tests and the color-consistency metrics) ----
struct Rgb {
  float r, g, b;
};
const std::vector<Rgb>& avatar_skin_palette();      // 8
const std::vector<Rgb>& avatar_hair_palette();      // 7 (engine-b uses all, engine-a first 6)
const std::vector<Rgb>& realistic_skin_palette();   // 8
const std::vector<Rgb>& realistic_hair_palette();   // 6
int nearest_palette_index(const std::vector<Rgb>& palette, int count, Rgb c);

}  // namespace af::engines
