#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include <zlib.h>

#include "styx/error.hpp"
#include "styx/features.hpp"
#include "styx/ml/binary_io.hpp"
#include "styx/ml/stacking.hpp"

namespace styx::ml {

// Model file layout (all integers little-endian):
//
//   offset  size  field
//   0       4     magic "STYX"
//   4       4     u32 format version
//   8       8     u64 payload length in bytes
//   16      n     payload
//   16+n    4     u32 CRC-32 of the payload
//
// Payload, in order: catalog hash (u64), feature names, seed, options
// (folds, PCA k, hyperparameters), scaler, PCA, base learners (tagged),
// meta-learner.
inline constexpr std::string_view kModelMagic = "STYX";
inline constexpr std::uint32_t kModelFormatVersion = 1;

namespace detail {

inline void save_options(BinaryWriter& w, const StackedOptions& o) {
  w.u64(o.folds);
  w.u64(o.pca_components);
  const auto& h = o.hyper;
  w.f64(h.logistic.l2);
  w.i64(h.logistic.max_iter);
  w.f64(h.logistic.tol);
  w.f64(h.logistic.learning_rate);
  w.u64(h.forest.trees);
  w.u64(h.forest.max_depth);
  for (const BoostingParams* b : {&h.boosting, &h.meta}) {
    w.u64(b->rounds);
    w.u64(b->max_depth);
    w.f64(b->learning_rate);
  }
  w.f64(h.svm.l2);
  w.i64(h.svm.epochs);
  w.f64(h.svm.learning_rate);
  w.u64(h.mlp.hidden);
  w.f64(h.mlp.learning_rate);
  w.f64(h.mlp.momentum);
  w.i64(h.mlp.epochs);
  w.u64(h.mlp.batch_size);
}

inline StackedOptions load_options(BinaryReader& r) {
  StackedOptions o;
  o.folds = r.u64();
  o.pca_components = r.u64();
  auto& h = o.hyper;
  h.logistic.l2 = r.f64();
  h.logistic.max_iter = static_cast<int>(r.i64());
  h.logistic.tol = r.f64();
  h.logistic.learning_rate = r.f64();
  h.forest.trees = r.u64();
  h.forest.max_depth = r.u64();
  for (BoostingParams* b : {&h.boosting, &h.meta}) {
    b->rounds = r.u64();
    b->max_depth = r.u64();
    b->learning_rate = r.f64();
  }
  h.svm.l2 = r.f64();
  h.svm.epochs = static_cast<int>(r.i64());
  h.svm.learning_rate = r.f64();
  h.mlp.hidden = r.u64();
  h.mlp.learning_rate = r.f64();
  h.mlp.momentum = r.f64();
  h.mlp.epochs = static_cast<int>(r.i64());
  h.mlp.batch_size = r.u64();
  return o;
}

inline std::uint32_t crc(std::string_view bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large payloads in chunks.
  while (!bytes.empty()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size(), 1u << 30));
    c = crc32(c, reinterpret_cast<const Bytef*>(bytes.data()), n);
    bytes.remove_prefix(n);
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace detail

inline std::string serialize_model(const StackedModel& m) {
  BinaryWriter p;
  p.u64(catalog_hash(m.feature_names));
  p.u64(m.feature_names.size());
  for (const auto& name : m.feature_names) p.str(name);
  p.u64(m.seed);
  detail::save_options(p, m.options);

  p.u64(m.scaler.input_width);
  p.sizes(m.scaler.retained);
  p.f64s(m.scaler.mean);
  p.f64s(m.scaler.sd);
  p.f64s(m.scaler.impute);
  p.sizes(m.scaler.dropped);
  p.u64(m.scaler.warnings.size());
  for (const auto& w : m.scaler.warnings) p.str(w);

  p.f64s(m.pca.mean);
  p.matrix(m.pca.components);
  p.f64s(m.pca.eigenvalues);
  p.f64s(m.pca.explained_ratio);

  p.u64(m.bases.size());
  for (const auto& b : m.bases) save_learner(p, b);
  m.meta.save(p);

  BinaryWriter file;
  for (char c : kModelMagic) file.u8(static_cast<std::uint8_t>(c));
  file.u32(kModelFormatVersion);
  file.u64(p.bytes().size());
  std::string out = file.bytes();
  out += p.bytes();
  BinaryWriter tail;
  tail.u32(detail::crc(p.bytes()));
  out += tail.bytes();
  return out;
}

/// Model plus the catalog hash it was trained under.
struct LoadedModel {
  StackedModel model;
  std::uint64_t catalog_hash = 0;
};

inline LoadedModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != kModelMagic) throw Error("not a model file (missing STYX header)");
  if (bytes.size() < 16) throw Error("model file checksum failure: file truncated");
  BinaryReader head(bytes.substr(4, 12));
  const std::uint32_t version = head.u32();
  if (version != kModelFormatVersion)
    throw Error("model format version " + std::to_string(version) + " is not supported (this build reads version " +
                std::to_string(kModelFormatVersion) + ")");
  const std::uint64_t len = head.u64();
  if (bytes.size() - 16 < 4 || bytes.size() - 16 - 4 != len)
    throw Error("model file checksum failure: payload length does not match file size (truncated?)");
  const std::string_view payload = bytes.substr(16, len);
  BinaryReader tail(bytes.substr(16 + len, 4));
  if (tail.u32() != detail::crc(payload)) throw Error("model file checksum failure: CRC mismatch");

  BinaryReader r(payload);
  LoadedModel out;
  StackedModel& m = out.model;
  out.catalog_hash = r.u64();
  const auto names = r.u64();
  if (names > r.remaining() / 8) throw Error("model file: corrupt feature list");
  for (std::uint64_t i = 0; i < names; ++i) m.feature_names.push_back(r.str());
  m.seed = r.u64();
  m.options = detail::load_options(r);

  m.scaler.input_width = r.u64();
  m.scaler.retained = r.sizes();
  m.scaler.mean = r.f64s();
  m.scaler.sd = r.f64s();
  m.scaler.impute = r.f64s();
  m.scaler.dropped = r.sizes();
  const auto warnings = r.u64();
  if (warnings > r.remaining() / 8) throw Error("model file: corrupt scaler");
  for (std::uint64_t i = 0; i < warnings; ++i) m.scaler.warnings.push_back(r.str());

  m.pca.mean = r.f64s();
  m.pca.components = r.matrix();
  m.pca.eigenvalues = r.f64s();
  m.pca.explained_ratio = r.f64s();

  const auto bases = r.u64();
  if (bases != kBaseLearners.size()) throw Error("model file: expected 5 base learners");
  for (std::uint64_t i = 0; i < bases; ++i) m.bases.push_back(load_learner(r));
  m.meta = GradientBoosting::load(r);
  if (!r.at_end()) throw Error("model file: trailing bytes in payload");
  if (out.catalog_hash != catalog_hash(m.feature_names)) throw Error("model file: catalog hash does not match its feature list");
  return out;
}

inline void save_model(const StackedModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model file: " + path);
  const std::string bytes = serialize_model(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing model file: " + path);
}

inline LoadedModel load_model(const std::string& path) { return deserialize_model(read_file(path)); }

}  // namespace styx::ml
