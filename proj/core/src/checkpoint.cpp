#include "satmarl/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace satmarl {

namespace {

constexpr char kMagic[4] = {'S', 'M', 'N', 'P'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("checkpoint: truncated file");
  return v;
}

void write_string(std::ostream& os, const std::string& s) {
  write_pod(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
  const auto len = read_pod<std::uint32_t>(is);
  if (len > 1u << 20) throw ConfigError("checkpoint: implausible string length");
  std::string s(len, '\0');
  is.read(s.data(), static_cast<std::streamsize>(len));
  if (!is) throw ConfigError("checkpoint: truncated file");
  return s;
}

}  // namespace

void save_params(const std::string& path, const ParamVector& p) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("checkpoint: cannot open for writing: " + path);

  os.write(kMagic, 4);
  write_pod(os, kVersion);

  // Spec block.
  write_pod(os, static_cast<std::int32_t>(p.spec.input_dim));
  write_pod(os, static_cast<std::uint32_t>(p.spec.hidden.size()));
  for (int h : p.spec.hidden) write_pod(os, static_cast<std::int32_t>(h));
  write_pod(os, static_cast<std::uint8_t>(p.spec.head == HeadKind::categorical ? 1 : 0));
  write_pod(os, static_cast<std::int32_t>(p.spec.n_actions));
  write_pod(os, static_cast<std::int32_t>(p.spec.n_heads));

  // Shape table.
  write_pod(os, static_cast<std::uint32_t>(p.shapes.size()));
  for (const auto& s : p.shapes) {
    write_string(os, s.name);
    write_pod(os, static_cast<std::uint64_t>(s.offset));
    write_pod(os, static_cast<std::uint64_t>(s.rows));
    write_pod(os, static_cast<std::uint64_t>(s.cols));
  }

  write_pod(os, static_cast<std::uint64_t>(p.data.size()));
  os.write(reinterpret_cast<const char*>(p.data.data()),
           static_cast<std::streamsize>(sizeof(double)) * p.data.size());
  if (!os) throw ConfigError("checkpoint: write failed: " + path);
}

ParamVector load_params(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open: " + path);

  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("checkpoint: bad magic in " + path);
  }
  if (read_pod<std::uint32_t>(is) != kVersion) {
    throw ConfigError("checkpoint: unsupported version in " + path);
  }

  ParamVector p;
  p.spec.input_dim = read_pod<std::int32_t>(is);
  const auto n_hidden = read_pod<std::uint32_t>(is);
  if (n_hidden > 64) throw ConfigError("checkpoint: implausible hidden layer count");
  p.spec.hidden.resize(n_hidden);
  for (auto& h : p.spec.hidden) h = read_pod<std::int32_t>(is);
  p.spec.head = read_pod<std::uint8_t>(is) != 0 ? HeadKind::categorical : HeadKind::scalar;
  p.spec.n_actions = read_pod<std::int32_t>(is);
  p.spec.n_heads = read_pod<std::int32_t>(is);

  const auto n_shapes = read_pod<std::uint32_t>(is);
  if (n_shapes > 1024) throw ConfigError("checkpoint: implausible shape count");
  p.shapes.resize(n_shapes);
  for (auto& s : p.shapes) {
    s.name = read_string(is);
    s.offset = static_cast<std::ptrdiff_t>(read_pod<std::uint64_t>(is));
    s.rows = static_cast<int>(read_pod<std::uint64_t>(is));
    s.cols = static_cast<int>(read_pod<std::uint64_t>(is));
  }

  const auto total = read_pod<std::uint64_t>(is);
  if (total > (1ull << 30)) throw ConfigError("checkpoint: implausible parameter count");
  p.data.resize(static_cast<Eigen::Index>(total));
  is.read(reinterpret_cast<char*>(p.data.data()),
          static_cast<std::streamsize>(sizeof(double) * total));
  if (!is) throw ConfigError("checkpoint: truncated parameter data in " + path);

  // Consistency: shape table must tile the flat vector.
  std::ptrdiff_t expect = 0;
  for (const auto& s : p.shapes) {
    if (s.offset != expect) throw ConfigError("checkpoint: shape table not contiguous");
    expect += static_cast<std::ptrdiff_t>(s.rows) * s.cols;
  }
  if (expect != static_cast<std::ptrdiff_t>(total)) {
    throw ConfigError("checkpoint: shape table does not match data length");
  }
  return p;
}

}  // namespace satmarl
