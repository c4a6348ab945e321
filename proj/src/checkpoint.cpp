#include <zlib.h>

#include <cstring>

#include "routeplace/gnn.hpp"

namespace routeplace {

namespace {

constexpr char kMagic[8] = {'R', 'G', 'N', 'N', 'C', 'K', 'P', 'T'};

void put_u32(std::string &out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

void put_f64(std::string &out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s_[pos_ + k])) << (8 * k);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(s_[pos_ + k])) << (8 * k);
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t k) {
    if (pos_ + k > s_.size()) throw CheckpointError("checkpoint truncated");
  }
  std::string_view s_;
  std::size_t pos_ = 8;
};

std::uint32_t crc_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef *>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace

std::string save_checkpoint(const RouteGnn &model) {
  const GnnDims &d = model.params().dims;
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kCheckpointVersion);
  for (int v : {d.cell, d.net, d.grid, d.topo, d.geom_edge, d.grid_edge, d.layers, d.readout_hidden,
                RawFeatures::kCell, RawFeatures::kNet, RawFeatures::kGrid, RawFeatures::kTopo, RawFeatures::kGridEdge}) {
    put_u32(out, static_cast<std::uint32_t>(v));
  }
  const FeatureStats &s = model.stats();
  for (const Eigen::RowVectorXd *vec : {&s.cell_mean, &s.cell_std, &s.net_mean, &s.net_std, &s.grid_mean, &s.grid_std,
                                        &s.topo_mean, &s.topo_std, &s.edge_mean, &s.edge_std}) {
    for (Eigen::Index k = 0; k < vec->size(); ++k) put_f64(out, (*vec)[k]);
  }
  model.params().visit([&](const std::string &, const double *data, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) put_f64(out, data[k]);
  });
  put_u32(out, crc_of(out));
  return out;
}

RouteGnn load_checkpoint(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic + 8 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw CheckpointError("not a RouteGNN checkpoint");
  }
  std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 12));  // Reader skips 8 bytes
  std::uint32_t stored_crc = tail.u32();
  if (stored_crc != crc_of(body)) throw CheckpointError("checkpoint checksum mismatch (corrupt or truncated)");

  Reader r(body);
  std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  GnnDims d;
  d.cell = static_cast<int>(r.u32());
  d.net = static_cast<int>(r.u32());
  d.grid = static_cast<int>(r.u32());
  d.topo = static_cast<int>(r.u32());
  d.geom_edge = static_cast<int>(r.u32());
  d.grid_edge = static_cast<int>(r.u32());
  d.layers = static_cast<int>(r.u32());
  d.readout_hidden = static_cast<int>(r.u32());
  const int widths[5] = {RawFeatures::kCell, RawFeatures::kNet, RawFeatures::kGrid, RawFeatures::kTopo,
                         RawFeatures::kGridEdge};
  for (int w : widths) {
    if (static_cast<int>(r.u32()) != w) throw CheckpointError("checkpoint raw-feature widths differ from this build");
  }
  if (d.cell <= 0 || d.net <= 0 || d.grid <= 0 || d.topo <= 0 || d.grid_edge <= 0 || d.layers < 0 || d.layers > 64 ||
      d.readout_hidden <= 0 || d.cell > 4096 || d.net > 4096 || d.grid > 4096) {
    throw CheckpointError("checkpoint dims out of range");
  }
  FeatureStats s = FeatureStats::identity();
  int k = 0;
  for (Eigen::RowVectorXd *vec : {&s.cell_mean, &s.cell_std, &s.net_mean, &s.net_std, &s.grid_mean, &s.grid_std,
                                  &s.topo_mean, &s.topo_std, &s.edge_mean, &s.edge_std}) {
    vec->resize(widths[k / 2]);
    for (Eigen::Index i = 0; i < vec->size(); ++i) (*vec)[i] = r.f64();
    ++k;
  }
  GnnParams p = GnnParams::zeros(d);
  p.visit([&](const std::string &, double *data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) data[i] = r.f64();
  });
  if (r.pos() != body.size()) throw CheckpointError("checkpoint has trailing bytes");
  return RouteGnn(std::move(p), std::move(s));
}

}  // namespace routeplace
