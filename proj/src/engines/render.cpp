#include <algorithm>
#include <cmath>

#include "af/engines.hpp"

// Layered 2D rasterizer over signed distances, normalized coordinates
// ([0,1]^2, y down). Two paint modes share the same geometry: hard-edged
// flat fills for the avatar engines, antialiased shaded fills for the
// realistic renderer.

namespace af::engines {

namespace {

struct Shape {
  enum Kind { kEllipse, kRect, kTriangle, kEllipseRing, kRectRing } kind = kEllipse;
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;  // kind-specific
  double rot = 0;
  double thick = 0;
  double clip_lo = -1e9, clip_hi = 1e9;  // y range kept

  static Shape ellipse(double cx, double cy, double rx, double ry) {
    Shape s;
    s.kind = kEllipse;
    s.a = cx;
    s.b = cy;
    s.c = rx;
    s.d = ry;
    return s;
  }
  static Shape ring(double cx, double cy, double rx, double ry, double thick) {
    Shape s = ellipse(cx, cy, rx, ry);
    s.kind = kEllipseRing;
    s.thick = thick;
    return s;
  }
  static Shape rect(double cx, double cy, double hw, double hh, double rot = 0) {
    Shape s;
    s.kind = kRect;
    s.a = cx;
    s.b = cy;
    s.c = hw;
    s.d = hh;
    s.rot = rot;
    return s;
  }
  static Shape rect_ring(double cx, double cy, double hw, double hh, double thick) {
    Shape s = rect(cx, cy, hw, hh);
    s.kind = kRectRing;
    s.thick = thick;
    return s;
  }
  static Shape triangle(double x0, double y0, double x1, double y1, double x2, double y2) {
    Shape s;
    s.kind = kTriangle;
    s.a = x0;
    s.b = y0;
    s.c = x1;
    s.d = y1;
    s.e = x2;
    s.f = y2;
    return s;
  }
  Shape clipped(double lo, double hi) const {
    Shape s = *this;
    s.clip_lo = lo;
    s.clip_hi = hi;
    return s;
  }

  double sdf(double x, double y) const {
    double v = 0;
    switch (kind) {
      case kEllipse:
      case kEllipseRing: {
        const double qx = (x - a) / c, qy = (y - b) / d;
        const double q = std::sqrt(qx * qx + qy * qy);
        v = (q - 1.0) * std::min(c, d);
        if (kind == kEllipseRing) v = std::fabs(v) - thick;
        break;
      }
      case kRect:
      case kRectRing: {
        double dx = x - a, dy = y - b;
        if (rot != 0.0) {
          const double cs = std::cos(-rot), sn = std::sin(-rot);
          const double rx = dx * cs - dy * sn, ry = dx * sn + dy * cs;
          dx = rx;
          dy = ry;
        }
        const double ax = std::fabs(dx) - c, ay = std::fabs(dy) - d;
        const double ox = std::max(ax, 0.0), oy = std::max(ay, 0.0);
        v = std::sqrt(ox * ox + oy * oy) + std::min(std::max(ax, ay), 0.0);
        if (kind == kRectRing) v = std::fabs(v) - thick;
        break;
      }
      case kTriangle: {
        // exact triangle sdf (Inigo Quilez formulation)
        const double ex0 = c - a, ey0 = d - b;
        const double ex1 = e - c, ey1 = f - d;
        const double ex2 = a - e, ey2 = b - f;
        const double vx0 = x - a, vy0 = y - b;
        const double vx1 = x - c, vy1 = y - d;
        const double vx2 = x - e, vy2 = y - f;
        auto clampd = [](double t) { return std::min(std::max(t, 0.0), 1.0); };
        const double t0 = clampd((vx0 * ex0 + vy0 * ey0) / (ex0 * ex0 + ey0 * ey0));
        const double t1 = clampd((vx1 * ex1 + vy1 * ey1) / (ex1 * ex1 + ey1 * ey1));
        const double t2 = clampd((vx2 * ex2 + vy2 * ey2) / (ex2 * ex2 + ey2 * ey2));
        const double px0 = vx0 - ex0 * t0, py0 = vy0 - ey0 * t0;
        const double px1 = vx1 - ex1 * t1, py1 = vy1 - ey1 * t1;
        const double px2 = vx2 - ex2 * t2, py2 = vy2 - ey2 * t2;
        const double d0 = px0 * px0 + py0 * py0;
        const double d1 = px1 * px1 + py1 * py1;
        const double d2 = px2 * px2 + py2 * py2;
        const double o = ex0 * ey2 - ey0 * ex2;
        const double s0 = o * (vx0 * ey0 - vy0 * ex0);
        const double s1 = o * (vx1 * ey1 - vy1 * ex1);
        const double s2 = o * (vx2 * ey2 - vy2 * ex2);
        const double dist = std::sqrt(std::min({d0, d1, d2}));
        v = (s0 >= 0 && s1 >= 0 && s2 >= 0) ? -dist : dist;
        break;
      }
    }
    v = std::max(v, clip_lo - y);
    v = std::max(v, y - clip_hi);
    return v;
  }
};

enum ShadeMode { kShadeNone, kShadeLit, kShadeLitTextured };

struct Layer {
  uint8_t label = kBackground;
  Rgb color{0, 0, 0};
  ShadeMode shade = kShadeNone;
  std::vector<Shape> shapes;

  double sdf(double x, double y) const {
    double v = 1e9;
    for (const auto& s : shapes) v = std::min(v, s.sdf(x, y));
    return v;
  }
};

// ---- palettes ----

const std::vector<Rgb>& avatar_skin() {
  static const std::vector<Rgb> p = {{0.99f, 0.88f, 0.76f}, {0.96f, 0.80f, 0.63f},
                                     {0.91f, 0.71f, 0.52f}, {0.83f, 0.61f, 0.42f},
                                     {0.71f, 0.49f, 0.32f}, {0.58f, 0.38f, 0.24f},
                                     {0.45f, 0.29f, 0.17f}, {0.32f, 0.20f, 0.12f}};
  return p;
}
const std::vector<Rgb>& avatar_hair() {
  static const std::vector<Rgb> p = {{0.09f, 0.09f, 0.11f}, {0.42f, 0.26f, 0.14f},
                                     {0.91f, 0.78f, 0.44f}, {0.70f, 0.23f, 0.14f},
                                     {0.76f, 0.76f, 0.79f}, {0.22f, 0.36f, 0.76f},
                                     {0.93f, 0.93f, 0.95f}};
  return p;
}
const std::vector<Rgb>& realistic_skin() {
  static const std::vector<Rgb> p = {{0.97f, 0.85f, 0.75f}, {0.93f, 0.78f, 0.64f},
                                     {0.88f, 0.69f, 0.54f}, {0.80f, 0.59f, 0.44f},
                                     {0.68f, 0.47f, 0.34f}, {0.56f, 0.37f, 0.26f},
                                     {0.43f, 0.28f, 0.19f}, {0.31f, 0.20f, 0.14f}};
  return p;
}
const std::vector<Rgb>& realistic_hair() {
  static const std::vector<Rgb> p = {{0.11f, 0.10f, 0.11f}, {0.40f, 0.27f, 0.16f},
                                     {0.87f, 0.75f, 0.46f}, {0.66f, 0.25f, 0.16f},
                                     {0.72f, 0.72f, 0.74f}, {0.24f, 0.34f, 0.70f}};
  return p;
}

constexpr Rgb kAvatarBackground{0.78f, 0.78f, 0.82f};
constexpr Rgb kEyeWhite{0.97f, 0.97f, 0.97f};
constexpr Rgb kIris{0.15f, 0.22f, 0.38f};
constexpr Rgb kMouthColor{0.72f, 0.30f, 0.30f};
constexpr Rgb kGlassFrame{0.08f, 0.08f, 0.09f};

Rgb scale_rgb(Rgb c, float s) { return {c.r * s, c.g * s, c.b * s}; }

// ---- face geometry ----

struct FaceGeom {
  double cx = 0.5, cy = 0.54;
  double rx = 0.25, ry = 0.30;
  double eye_dx = 0, eye_y = 0, eye_r = 0;
  double brow_y = 0, brow_hw = 0, brow_hh = 0;
  double nose_y = 0, nose_hw = 0, nose_hh = 0;
  double mouth_y = 0, mouth_hw = 0, mouth_hh = 0;
};

FaceGeom face_geom(double head_width, double head_length, double eye_size, double mouth_width) {
  FaceGeom g;
  g.rx = 0.21 + 0.09 * head_width;
  g.ry = 0.25 + 0.10 * head_length;
  const double sx = g.rx / 0.25, sy = g.ry / 0.30;
  g.eye_dx = 0.42 * g.rx;
  g.eye_y = g.cy - 0.18 * g.ry;
  g.eye_r = (0.030 + 0.022 * eye_size) * sx;
  g.brow_y = g.eye_y - (0.085 + 0.022 * eye_size) * sy;
  g.brow_hw = 0.055 * sx;
  g.brow_hh = 0.010 * sy;
  g.nose_y = g.cy + 0.06 * g.ry;
  g.nose_hw = 0.024 * sx;
  g.nose_hh = 0.055 * sy;
  g.mouth_y = g.cy + 0.52 * g.ry;
  g.mouth_hw = (0.050 + 0.055 * mouth_width) * sx;
  g.mouth_hh = 0.020 * sy;
  return g;
}

// Hair silhouettes, indexed by family. `back` renders behind the head,
// `front` on top of the features. `bulk` scales the silhouette outward
// (engine-b long variants).
void hair_shapes(int type, const FaceGeom& g, double bulk, std::vector<Shape>& back,
                 std::vector<Shape>& front) {
  const double cx = g.cx, cy = g.cy, rx = g.rx, ry = g.ry;
  const double k = bulk;
  auto cap = [&](double grow, double cut) {
    return Shape::ellipse(cx, cy - 0.10 * ry, rx * grow, ry * grow)
        .clipped(-1e9, cy - cut * ry);
  };
  switch (type) {
    case 0:  // bald
      break;
    case 1:  // buzz cap
      front.push_back(cap(1.06 * k, 0.46));
      break;
    case 2:  // bowl
      front.push_back(cap(1.12 * k, 0.26));
      break;
    case 3:  // side part, left heavy
      front.push_back(cap(1.10 * k, 0.40));
      front.push_back(Shape::rect(cx - 0.55 * rx, cy - 0.52 * ry, 0.42 * rx * k, 0.16 * ry, 0.5));
      break;
    case 4:  // side part, right heavy
      front.push_back(cap(1.10 * k, 0.40));
      front.push_back(Shape::rect(cx + 0.55 * rx, cy - 0.52 * ry, 0.42 * rx * k, 0.16 * ry, -0.5));
      break;
    case 5: {  // spiky
      front.push_back(cap(1.05 * k, 0.50));
      for (int i = -2; i <= 2; ++i) {
        const double bx = cx + i * 0.38 * rx;
        const double by = cy - 1.02 * ry;
        front.push_back(Shape::triangle(bx - 0.16 * rx, by + 0.3 * ry, bx + 0.16 * rx, by + 0.3 * ry,
                                        bx + i * 0.05 * rx, by - (0.38 + 0.1 * ((i + 4) % 3)) * ry * k));
      }
      break;
    }
    case 6:  // afro
      back.push_back(Shape::ellipse(cx, cy - 0.55 * ry, 1.30 * rx * k, 0.95 * ry * k));
      break;
    case 7:  // long straight
      back.push_back(Shape::ellipse(cx, cy - 0.15 * ry, 1.22 * rx * k, 1.05 * ry));
      back.push_back(Shape::rect(cx, cy + 0.45 * ry, 1.18 * rx * k, 0.62 * ry));
      front.push_back(cap(1.08 * k, 0.42));
      break;
    case 8:  // ponytail
      front.push_back(cap(1.06 * k, 0.44));
      back.push_back(Shape::ellipse(cx + 0.80 * rx, cy - 0.95 * ry, 0.34 * rx * k, 0.26 * ry * k));
      back.push_back(Shape::rect(cx + 1.02 * rx, cy - 0.45 * ry, 0.13 * rx, 0.45 * ry * k, -0.25));
      break;
    case 9:  // mohawk
      back.push_back(Shape::rect(cx, cy - 1.05 * ry, 0.16 * rx * k, 0.40 * ry * k));
      front.push_back(cap(1.02, 0.72));
      break;
    case 10: {  // curly
      for (int i = -2; i <= 2; ++i) {
        const double t = i * 0.42;
        back.push_back(Shape::ellipse(cx + std::sin(t) * 1.02 * rx, cy - 0.10 * ry - std::cos(t) * 0.95 * ry,
                                      0.34 * rx * k, 0.30 * ry * k));
      }
      break;
    }
    case 11: {  // fringe
      front.push_back(cap(1.10 * k, 0.34));
      for (int i = -2; i <= 2; ++i) {
        const double bx = cx + i * 0.34 * rx;
        const double by = cy - 0.34 * ry;
        front.push_back(Shape::triangle(bx - 0.17 * rx, by - 0.15 * ry, bx + 0.17 * rx, by - 0.15 * ry,
                                        bx, by + 0.22 * ry * k));
      }
      break;
    }
    default:
      break;
  }
}

void glasses_shapes(int style, const FaceGeom& g, std::vector<Shape>& out) {
  const double t = 1.4 / kResolution / 2.0;  // frame half-thickness
  const double r = g.eye_r * 1.9;
  if (style == 1) {  // rectangular
    out.push_back(Shape::rect_ring(g.cx - g.eye_dx, g.eye_y, r * 1.05, r * 0.78, t));
    out.push_back(Shape::rect_ring(g.cx + g.eye_dx, g.eye_y, r * 1.05, r * 0.78, t));
  } else {  // round
    out.push_back(Shape::ring(g.cx - g.eye_dx, g.eye_y, r, r, t));
    out.push_back(Shape::ring(g.cx + g.eye_dx, g.eye_y, r, r, t));
  }
  // bridge and temples
  out.push_back(Shape::rect(g.cx, g.eye_y - 0.2 * g.eye_r, g.eye_dx - r * 0.8, 2 * t));
  out.push_back(Shape::rect(g.cx - g.eye_dx - (r + g.rx - g.eye_dx) / 2, g.eye_y - 0.2 * g.eye_r,
                            (g.rx - g.eye_dx + r) / 2 * 1.04, 2 * t));
  out.push_back(Shape::rect(g.cx + g.eye_dx + (r + g.rx - g.eye_dx) / 2, g.eye_y - 0.2 * g.eye_r,
                            (g.rx - g.eye_dx + r) / 2 * 1.04, 2 * t));
}

struct FaceSpec {
  FaceGeom geom;
  Rgb skin, hair, brow;
  int hair_type = 0;       // family for realistic / engine-a; resolved for engine-b
  double hair_bulk = 1.0;
  int glasses = kAbsent;   // style or absent
  int brow_preset = 0;     // engine-b only
};

std::vector<Layer> build_layers(const FaceSpec& fs, bool flat) {
  const FaceGeom& g = fs.geom;
  std::vector<Layer> layers;

  std::vector<Shape> hair_back, hair_front;
  hair_shapes(fs.hair_type, g, fs.hair_bulk, hair_back, hair_front);

  if (!hair_back.empty()) layers.push_back({kHair, fs.hair, kShadeLitTextured, hair_back});

  // head with a darker outline ring in flat mode
  if (flat) {
    Layer outline{kSkin, scale_rgb(fs.skin, 0.45f), kShadeNone, {Shape::ellipse(g.cx, g.cy, g.rx, g.ry)}};
    layers.push_back(outline);
    layers.push_back({kSkin, fs.skin, kShadeNone,
                      {Shape::ellipse(g.cx, g.cy, g.rx - 1.5 / kResolution, g.ry - 1.5 / kResolution)}});
  } else {
    layers.push_back({kSkin, fs.skin, kShadeLitTextured, {Shape::ellipse(g.cx, g.cy, g.rx, g.ry)}});
  }

  layers.push_back({kBrow,
                    fs.brow,
                    kShadeLit,
                    {Shape::rect(g.cx - g.eye_dx, g.brow_y, g.brow_hw * (1 + 0.15 * fs.brow_preset),
                                 g.brow_hh * (1 + 0.3 * (fs.brow_preset % 3)), 0.18 - 0.09 * fs.brow_preset),
                     Shape::rect(g.cx + g.eye_dx, g.brow_y, g.brow_hw * (1 + 0.15 * fs.brow_preset),
                                 g.brow_hh * (1 + 0.3 * (fs.brow_preset % 3)), -0.18 + 0.09 * fs.brow_preset)}});

  layers.push_back({kEyes,
                    kEyeWhite,
                    kShadeNone,
                    {Shape::ellipse(g.cx - g.eye_dx, g.eye_y, g.eye_r, g.eye_r * 0.80),
                     Shape::ellipse(g.cx + g.eye_dx, g.eye_y, g.eye_r, g.eye_r * 0.80)}});
  layers.push_back({kEyes,
                    kIris,
                    kShadeNone,
                    {Shape::ellipse(g.cx - g.eye_dx, g.eye_y, g.eye_r * 0.45, g.eye_r * 0.45),
                     Shape::ellipse(g.cx + g.eye_dx, g.eye_y, g.eye_r * 0.45, g.eye_r * 0.45)}});

  layers.push_back({kNose,
                    scale_rgb(fs.skin, 0.82f),
                    kShadeLit,
                    {Shape::triangle(g.cx - g.nose_hw, g.nose_y + g.nose_hh, g.cx + g.nose_hw,
                                     g.nose_y + g.nose_hh, g.cx, g.nose_y - g.nose_hh)}});

  layers.push_back({kMouth,
                    kMouthColor,
                    kShadeLit,
                    {Shape::ellipse(g.cx, g.mouth_y, g.mouth_hw, g.mouth_hh)}});

  if (!hair_front.empty()) layers.push_back({kHair, fs.hair, kShadeLitTextured, hair_front});

  if (fs.glasses != kAbsent) {
    std::vector<Shape> gs;
    glasses_shapes(fs.glasses, g, gs);
    layers.push_back({kGlasses, kGlassFrame, kShadeNone, std::move(gs)});
  }
  return layers;
}

// ---- flat paint (avatar engines) ----

std::pair<Tensor, SegMap> paint_flat(const std::vector<Layer>& layers) {
  const int R = kResolution;
  Tensor img({3, R, R});
  SegMap seg;
  seg.h = R;
  seg.w = R;
  seg.labels.assign(static_cast<size_t>(R) * R, kBackground);
  const int64_t plane = static_cast<int64_t>(R) * R;
  for (int64_t i = 0; i < plane; ++i) {
    img.v[0 * plane + i] = kAvatarBackground.r;
    img.v[1 * plane + i] = kAvatarBackground.g;
    img.v[2 * plane + i] = kAvatarBackground.b;
  }
  for (const auto& layer : layers) {
    for (int py = 0; py < R; ++py) {
      const double y = (py + 0.5) / R;
      for (int px = 0; px < R; ++px) {
        const double x = (px + 0.5) / R;
        if (layer.sdf(x, y) < 0.0) {
          const int64_t i = static_cast<int64_t>(py) * R + px;
          img.v[0 * plane + i] = layer.color.r;
          img.v[1 * plane + i] = layer.color.g;
          img.v[2 * plane + i] = layer.color.b;
          seg.labels[static_cast<size_t>(i)] = layer.label;
        }
      }
    }
  }
  return {std::move(img), std::move(seg)};
}

// ---- soft paint (realistic renderer) ----

struct SoftEnv {
  double lx = 0, ly = 0;       // light direction * strength
  float tint[3] = {1, 1, 1};
  Rgb bg_top{0.5f, 0.5f, 0.55f}, bg_bottom{0.6f, 0.6f, 0.62f};
  double noise[10][10] = {};
  double noise_amp = 0.035;
  double softness = 1.8 / kResolution;
  double cx = 0.5, cy = 0.54;

  double value_noise(double x, double y) const {
    const double fx = x * 9.0, fy = y * 9.0;
    const int ix = std::min(8, static_cast<int>(fx)), iy = std::min(8, static_cast<int>(fy));
    const double tx = fx - ix, ty = fy - iy;
    const double v00 = noise[iy][ix], v01 = noise[iy][ix + 1];
    const double v10 = noise[iy + 1][ix], v11 = noise[iy + 1][ix + 1];
    return (v00 * (1 - tx) + v01 * tx) * (1 - ty) + (v10 * (1 - tx) + v11 * tx) * ty;
  }
  double shade(double x, double y) const {
    const double s = 1.0 + ((x - cx) * lx + (y - cy) * ly) / 0.35;
    return std::min(1.2, std::max(0.8, s));
  }
};

SoftEnv make_env(const FaceAttributes& a, uint64_t seed) {
  Rng rng(Rng::mix(seed, 0x50f7));
  SoftEnv env;
  const double ang = rng.uniform(0.0, 6.283185307179586);
  const double strength = rng.uniform(0.05, 0.13);
  env.lx = std::cos(ang) * strength;
  env.ly = std::sin(ang) * strength;
  for (int c = 0; c < 3; ++c) env.tint[c] = static_cast<float>(rng.uniform(0.93, 1.07));
  const float base = static_cast<float>(rng.uniform(0.40, 0.72));
  auto jitter = [&](float b) {
    return Rgb{std::clamp(b + static_cast<float>(rng.uniform(-0.14, 0.14)), 0.0f, 1.0f),
               std::clamp(b + static_cast<float>(rng.uniform(-0.14, 0.14)), 0.0f, 1.0f),
               std::clamp(b + static_cast<float>(rng.uniform(-0.14, 0.14)), 0.0f, 1.0f)};
  };
  env.bg_top = jitter(base);
  env.bg_bottom = jitter(base + 0.12f);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) env.noise[i][j] = rng.uniform(-1.0, 1.0);
  env.cx = 0.5;
  env.cy = 0.54;
  (void)a;
  return env;
}

std::pair<Tensor, SegMap> paint_soft(const std::vector<Layer>& layers, const SoftEnv& env) {
  const int R = kResolution;
  Tensor img({3, R, R});
  SegMap seg;
  seg.h = R;
  seg.w = R;
  seg.labels.assign(static_cast<size_t>(R) * R, kBackground);
  const int64_t plane = static_cast<int64_t>(R) * R;
  for (int py = 0; py < R; ++py) {
    const double y = (py + 0.5) / R;
    for (int px = 0; px < R; ++px) {
      const double x = (px + 0.5) / R;
      const int64_t i = static_cast<int64_t>(py) * R + px;
      const double t = y;
      const double bn = 1.0 + 0.5 * env.noise_amp * env.value_noise(x, y);
      double r = (env.bg_top.r * (1 - t) + env.bg_bottom.r * t) * bn;
      double g = (env.bg_top.g * (1 - t) + env.bg_bottom.g * t) * bn;
      double b = (env.bg_top.b * (1 - t) + env.bg_bottom.b * t) * bn;
      uint8_t label = kBackground;
      for (const auto& layer : layers) {
        const double d = layer.sdf(x, y);
        if (d > env.softness) continue;
        // alpha ramps across [-softness, softness]
        double alpha = 0.5 - 0.5 * d / env.softness;
        alpha = std::min(1.0, std::max(0.0, alpha));
        double lr = layer.color.r, lg = layer.color.g, lb = layer.color.b;
        if (layer.shade != kShadeNone) {
          double s = env.shade(x, y);
          if (layer.shade == kShadeLitTextured) s *= 1.0 + env.noise_amp * env.value_noise(x, y);
          lr *= s;
          lg *= s;
          lb *= s;
        }
        r = r * (1 - alpha) + lr * alpha;
        g = g * (1 - alpha) + lg * alpha;
        b = b * (1 - alpha) + lb * alpha;
        if (alpha > 0.5) label = layer.label;
      }
      img.v[0 * plane + i] = std::clamp(static_cast<float>(r) * env.tint[0], 0.0f, 1.0f);
      img.v[1 * plane + i] = std::clamp(static_cast<float>(g) * env.tint[1], 0.0f, 1.0f);
      img.v[2 * plane + i] = std::clamp(static_cast<float>(b) * env.tint[2], 0.0f, 1.0f);
      seg.labels[static_cast<size_t>(i)] = label;
    }
  }
  return {std::move(img), std::move(seg)};
}

// ---- engine wiring ----

double cont(const AvatarVector& v, const std::string& name) { return v.continuous.at(name); }
int disc(const AvatarVector& v, const std::string& name) { return v.discrete.at(name); }

FaceSpec spec_engine_a(const AvatarVector& v) {
  FaceSpec fs;
  fs.geom = face_geom(cont(v, "head_width"), cont(v, "head_length"), cont(v, "eye_size"),
                      cont(v, "mouth_width"));
  fs.skin = avatar_skin()[static_cast<size_t>(disc(v, "skin_tone"))];
  fs.hair = avatar_hair()[static_cast<size_t>(disc(v, "hair_color"))];
  fs.brow = scale_rgb(fs.hair, 0.55f);
  fs.hair_type = disc(v, "hair_type");
  fs.glasses = disc(v, "glasses");
  return fs;
}

FaceSpec spec_engine_b(const AvatarVector& v) {
  FaceSpec fs;
  static const double head_presets[6][2] = {{1.00, 1.00}, {1.12, 0.92}, {0.90, 1.10},
                                            {1.06, 1.06}, {0.94, 0.90}, {1.10, 1.16}};
  const auto& hp = head_presets[disc(v, "head_type")];
  fs.geom = face_geom(0.5, 0.5, 0.5, 0.5);
  fs.geom.rx *= hp[0];
  fs.geom.ry *= hp[1];
  fs.skin = avatar_skin()[static_cast<size_t>(disc(v, "skin_tone"))];
  fs.hair = avatar_hair()[static_cast<size_t>(disc(v, "hair_color"))];
  fs.brow = scale_rgb(fs.hair, 0.55f);
  // 22 assets = 11 non-bald families x {standard, bulky}
  const int ht = disc(v, "hair_type");
  fs.hair_type = 1 + ht % 11;
  fs.hair_bulk = ht / 11 == 0 ? 1.0 : 1.22;
  fs.brow_preset = disc(v, "brow_type");
  fs.glasses = disc(v, "glasses");
  return fs;
}

FaceSpec spec_for(const EngineSchema& s, const AvatarVector& v) {
  if (s.name == "engine-a") return spec_engine_a(v);
  if (s.name == "engine-b") return spec_engine_b(v);
  throw std::out_of_range("no renderer for schema: " + s.name);
}

}  // namespace

const std::vector<Rgb>& avatar_skin_palette() { return avatar_skin(); }
const std::vector<Rgb>& avatar_hair_palette() { return avatar_hair(); }
const std::vector<Rgb>& realistic_skin_palette() { return realistic_skin(); }
const std::vector<Rgb>& realistic_hair_palette() { return realistic_hair(); }

int nearest_palette_index(const std::vector<Rgb>& palette, int count, Rgb c) {
  int best = 0;
  double bd = 1e30;
  for (int i = 0; i < count && i < static_cast<int>(palette.size()); ++i) {
    const double dr = palette[static_cast<size_t>(i)].r - c.r;
    const double dg = palette[static_cast<size_t>(i)].g - c.g;
    const double db = palette[static_cast<size_t>(i)].b - c.b;
    const double d = dr * dr + dg * dg + db * db;
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

std::pair<Tensor, SegMap> render_avatar_debug(const EngineSchema& s, const AvatarVector& v) {
  validate_or_throw(s, v);
  return paint_flat(build_layers(spec_for(s, v), /*flat=*/true));
}

Tensor render_avatar(const EngineSchema& s, const AvatarVector& v) {
  return render_avatar_debug(s, v).first;
}

std::pair<Tensor, SegMap> render_realistic(const FaceAttributes& a, uint64_t seed) {
  FaceSpec fs;
  fs.geom = face_geom(a.head_width, a.head_length, a.eye_size, a.mouth_width);
  fs.skin = realistic_skin()[static_cast<size_t>(a.skin_tone)];
  fs.hair = realistic_hair()[static_cast<size_t>(a.hair_color)];
  fs.brow = scale_rgb(fs.hair, 0.55f);
  fs.hair_type = a.hair_style;
  fs.glasses = a.glasses ? 0 : kAbsent;  // realistic faces wear round frames
  auto layers = build_layers(fs, /*flat=*/false);
  return paint_soft(layers, make_env(a, seed));
}

FaceAttributes sample_face_attributes(Rng& rng) {
  FaceAttributes a;
  a.skin_tone = rng.uniform_int(8);
  a.hair_style = rng.uniform_int(12);
  a.hair_color = rng.uniform_int(6);
  a.glasses = rng.bernoulli(0.5);
  a.head_width = rng.uniform();
  a.head_length = rng.uniform();
  a.eye_size = rng.uniform();
  a.mouth_width = rng.uniform();
  return a;
}

PartialVector attribute_oracle(const EngineSchema& s, const FaceAttributes& a) {
  PartialVector p;
  const Rgb skin = realistic_skin()[static_cast<size_t>(a.skin_tone)];
  const Rgb hair = realistic_hair()[static_cast<size_t>(a.hair_color)];
  if (s.name == "engine-a") {
    p.discrete["skin_tone"] = nearest_palette_index(avatar_skin(), 8, skin);
    p.discrete["hair_color"] = nearest_palette_index(avatar_hair(), 6, hair);
    p.discrete["hair_type"] = a.hair_style;
    p.discrete["glasses"] = a.glasses ? 0 : kAbsent;
    p.continuous["head_width"] = a.head_width;
    p.continuous["head_length"] = a.head_length;
    p.continuous["eye_size"] = a.eye_size;
    p.continuous["mouth_width"] = a.mouth_width;
  } else if (s.name == "engine-b") {
    p.discrete["skin_tone"] = nearest_palette_index(avatar_skin(), 8, skin);
    p.discrete["hair_color"] = nearest_palette_index(avatar_hair(), 7, hair);
    // family -> standard-length engine-b asset; bald maps to the buzz cut
    p.discrete["hair_type"] = a.hair_style == 0 ? 0 : a.hair_style - 1;
    p.discrete["glasses"] = a.glasses ? 0 : kAbsent;
  } else {
    throw std::out_of_range("attribute_oracle: not a builtin engine: " + s.name);
  }
  return p;
}

AvatarVector complete_with_defaults(const EngineSchema& s, const PartialVector& p) {
  AvatarVector v;
  for (const auto& a : s.attributes) {
    if (a.kind == AttrKind::kContinuous) {
      auto it = p.continuous.find(a.name);
      v.continuous[a.name] = it == p.continuous.end() ? 0.5 : it->second;
    } else {
      auto it = p.discrete.find(a.name);
      v.discrete[a.name] = it == p.discrete.end() ? 0 : it->second;
    }
  }
  return v;
}

}  // namespace af::engines
