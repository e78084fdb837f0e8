#include "satpin/rpc_model.hpp"

#include <cmath>
#include <string>

#include "satpin/error.hpp"
#include "satpin/kv_text.hpp"

namespace satpin {
namespace {

constexpr double kMinDenominator = 1e-10;
constexpr int kMaxNewtonIterations = 50;
constexpr int kMaxStepHalvings = 8;
constexpr double kInverseTolerancePx = 1e-9;
constexpr double kJacobianStep = 1e-6;

struct ScalarNormalizer {
  const char* key;
  double RpcModel::*field;
};

constexpr ScalarNormalizer kNormalizers[] = {
    {"LINE_OFF", &RpcModel::line_off},     {"SAMP_OFF", &RpcModel::samp_off},
    {"LAT_OFF", &RpcModel::lat_off},       {"LONG_OFF", &RpcModel::lon_off},
    {"HEIGHT_OFF", &RpcModel::alt_off},    {"LINE_SCALE", &RpcModel::line_scale},
    {"SAMP_SCALE", &RpcModel::samp_scale}, {"LAT_SCALE", &RpcModel::lat_scale},
    {"LONG_SCALE", &RpcModel::lon_scale},  {"HEIGHT_SCALE", &RpcModel::alt_scale},
};

struct CoefficientBlock {
  const char* prefix;
  RpcCoefficients RpcModel::*field;
};

constexpr CoefficientBlock kBlocks[] = {
    {"LINE_NUM_COEFF_", &RpcModel::line_num},
    {"LINE_DEN_COEFF_", &RpcModel::line_den},
    {"SAMP_NUM_COEFF_", &RpcModel::samp_num},
    {"SAMP_DEN_COEFF_", &RpcModel::samp_den},
};

const char* unit_for(const std::string& key) {
  if (key == "LINE_OFF" || key == "SAMP_OFF" || key == "LINE_SCALE" || key == "SAMP_SCALE")
    return " pixels";
  if (key == "HEIGHT_OFF" || key == "HEIGHT_SCALE") return " meters";
  if (key.rfind("LAT", 0) == 0 || key.rfind("LONG", 0) == 0) return " degrees";
  return "";
}

PixelPoint evaluate(const RpcModel& m, const NormalizedGround& g) {
  const auto mono = rpc_monomials(g.p, g.l, g.h);
  const double samp_den = evaluate_cubic(m.samp_den, mono);
  const double line_den = evaluate_cubic(m.line_den, mono);
  if (std::abs(samp_den) < kMinDenominator || std::abs(line_den) < kMinDenominator) {
    fail(ErrorKind::kSingular, "RPC denominator vanishes at the requested point");
  }
  return {m.samp_off + m.samp_scale * evaluate_cubic(m.samp_num, mono) / samp_den,
          m.line_off + m.line_scale * evaluate_cubic(m.line_num, mono) / line_den};
}

}  // namespace

void validate(const GeoPoint& p) {
  if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0) ||
      !std::isfinite(p.alt)) {
    fail(ErrorKind::kPrecondition, "geodetic point out of range");
  }
}

void RpcModel::validate() const {
  for (const auto& n : kNormalizers) {
    const double v = this->*n.field;
    if (!std::isfinite(v)) fail(ErrorKind::kPrecondition, std::string(n.key) + " is not finite");
  }
  const std::pair<const char*, double> scales[] = {{"LINE_SCALE", line_scale},
                                                   {"SAMP_SCALE", samp_scale},
                                                   {"LAT_SCALE", lat_scale},
                                                   {"LONG_SCALE", lon_scale},
                                                   {"HEIGHT_SCALE", alt_scale}};
  for (const auto& [key, v] : scales) {
    if (!(v > 0.0)) fail(ErrorKind::kPrecondition, std::string(key) + " must be strictly positive");
  }
  if (line_den[0] != 1.0) fail(ErrorKind::kPrecondition, "LINE_DEN_COEFF_1 must equal 1");
  if (samp_den[0] != 1.0) fail(ErrorKind::kPrecondition, "SAMP_DEN_COEFF_1 must equal 1");
}

NormalizedGround normalize(const RpcModel& m, const GeoPoint& p) {
  return {(p.lat - m.lat_off) / m.lat_scale, (p.lon - m.lon_off) / m.lon_scale,
          (p.alt - m.alt_off) / m.alt_scale};
}

RpcCoefficients rpc_monomials(double p, double l, double h) {
  return {1.0,       l,         p,         h,         l * p,     l * h,     p * h,
          l * l,     p * p,     h * h,     p * l * h, l * l * l, l * p * p, l * h * h,
          l * l * p, p * p * p, p * h * h, l * l * h, p * p * h, h * h * h};
}

double evaluate_cubic(const RpcCoefficients& coeffs, const RpcCoefficients& monomials) {
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) sum += coeffs[i] * monomials[i];
  return sum;
}

ForwardProjection project_forward_checked(const RpcModel& model, const GeoPoint& p) {
  const NormalizedGround g = normalize(model, p);
  const bool extrapolated =
      std::abs(g.p) > kSoftBound || std::abs(g.l) > kSoftBound || std::abs(g.h) > kSoftBound;
  return {evaluate(model, g), extrapolated};
}

PixelPoint project_forward(const RpcModel& model, const GeoPoint& p) {
  return evaluate(model, normalize(model, p));
}

GeoPoint project_inverse(const RpcModel& model, const PixelPoint& px, double alt) {
  const double h = (alt - model.alt_off) / model.alt_scale;
  if (!(std::abs(h) <= kSoftBound)) {
    fail(ErrorKind::kPrecondition, "altitude outside the RPC validity volume");
  }

  auto residual = [&](double p, double l) {
    const PixelPoint q = evaluate(model, {p, l, h});
    return std::pair{q.samp - px.samp, q.line - px.line};
  };

  double p = 0.0;
  double l = 0.0;
  auto [rs, rl] = residual(p, l);
  double norm = std::hypot(rs, rl);
  for (int iter = 0; iter < kMaxNewtonIterations; ++iter) {
    if (norm <= kInverseTolerancePx) {
      return {model.lat_off + p * model.lat_scale, model.lon_off + l * model.lon_scale, alt};
    }
    // Central differences; columns are d(samp, line)/dP and d(samp, line)/dL.
    const auto [sp_hi, lp_hi] = residual(p + kJacobianStep, l);
    const auto [sp_lo, lp_lo] = residual(p - kJacobianStep, l);
    const auto [sl_hi, ll_hi] = residual(p, l + kJacobianStep);
    const auto [sl_lo, ll_lo] = residual(p, l - kJacobianStep);
    const double j00 = (sp_hi - sp_lo) / (2 * kJacobianStep);
    const double j10 = (lp_hi - lp_lo) / (2 * kJacobianStep);
    const double j01 = (sl_hi - sl_lo) / (2 * kJacobianStep);
    const double j11 = (ll_hi - ll_lo) / (2 * kJacobianStep);
    const double det = j00 * j11 - j01 * j10;
    if (std::abs(det) < 1e-300) {
      fail(ErrorKind::kDivergence, "singular Jacobian in RPC inverse", norm);
    }
    double dp = -(j11 * rs - j01 * rl) / det;
    double dl = -(-j10 * rs + j00 * rl) / det;

    bool improved = false;
    for (int halving = 0; halving <= kMaxStepHalvings; ++halving) {
      const auto [ns, nl] = residual(p + dp, l + dl);
      const double new_norm = std::hypot(ns, nl);
      if (new_norm < norm) {
        p += dp;
        l += dl;
        rs = ns;
        rl = nl;
        norm = new_norm;
        improved = true;
        break;
      }
      dp *= 0.5;
      dl *= 0.5;
    }
    // No decrease even with a tiny step: we are at the floating-point floor.
    if (!improved && norm <= 1e-6) {
      return {model.lat_off + p * model.lat_scale, model.lon_off + l * model.lon_scale, alt};
    }
  }
  if (norm <= kInverseTolerancePx) {
    return {model.lat_off + p * model.lat_scale, model.lon_off + l * model.lon_scale, alt};
  }
  fail(ErrorKind::kDivergence, "RPC inverse did not converge", norm);
}

RpcModel parse_rpc(std::string_view text) {
  const KvDocument doc = KvDocument::parse(text);
  RpcModel model;
  for (const auto& n : kNormalizers) {
    if (!doc.contains(n.key)) fail(ErrorKind::kParse, std::string("missing key ") + n.key);
    model.*n.field = doc.number(n.key);
  }
  for (const auto& block : kBlocks) {
    auto& coeffs = model.*block.field;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const std::string key = block.prefix + std::to_string(i + 1);
      if (!doc.contains(key)) fail(ErrorKind::kParse, "missing key " + key);
      coeffs[i] = doc.number(key);
    }
  }
  model.validate();
  return model;
}

std::string serialize_rpc(const RpcModel& model) {
  std::string out;
  for (const auto& n : kNormalizers) {
    out += std::string(n.key) + ": " + format_double(model.*n.field) + unit_for(n.key) + "\n";
  }
  for (const auto& block : kBlocks) {
    const auto& coeffs = model.*block.field;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      out += block.prefix + std::to_string(i + 1) + ": " + format_double(coeffs[i]) + "\n";
    }
  }
  return out;
}

RpcModel read_rpc_file(const std::filesystem::path& path) {
  return parse_rpc(read_text_file(path));
}

void write_rpc_file(const std::filesystem::path& path, const RpcModel& model) {
  write_text_file(path, serialize_rpc(model));
}

}  // namespace satpin
