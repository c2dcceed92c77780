/// @file field_io.cpp
/// @brief NSSF1 reader/writer.
///
/// Layout: "NSSF" magic, version byte (1), flags byte (bit 0 pressure,
/// bits 1-3 per-axis periodicity), four u32 dims (nx, ny, nz, nt), eight f64
/// box values (x0, x1, y0, y1, z0, z1, t_begin, t_end), then the payload as
/// little-endian f64, slowest to fastest: time, component (u1, u2, u3 and P
/// when present), z, y, x.
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "nssl/errors.hpp"
#include "nssl/field.hpp"

namespace nssl {

namespace {

constexpr char kMagic[4] = {'N', 'S', 'S', 'F'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 1 + 1 + 4 * 4 + 8 * 8;

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& buf, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

SampledField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open field file: " + path);
  in.seekg(0, std::ios::end);
  const std::size_t file_size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);

  if (file_size < kHeaderSize)
    throw FormatError("file too short for NSSF1 header", file_size);

  std::vector<unsigned char> head(kHeaderSize);
  in.read(reinterpret_cast<char*>(head.data()), kHeaderSize);

  if (std::memcmp(head.data(), kMagic, 4) != 0)
    throw FormatError("bad magic, expected NSSF", 0);
  if (head[4] != kVersion)
    throw FormatError("unsupported NSSF version " + std::to_string(head[4]), 4);
  const std::uint8_t flags = head[5];
  if (flags & ~0x0Fu)
    throw FormatError("unknown NSSF flag bits set", 5);

  const bool has_pressure = flags & 0x01u;
  GridGeometry geom;
  geom.nx = static_cast<int>(get_u32(&head[6]));
  geom.ny = static_cast<int>(get_u32(&head[10]));
  geom.nz = static_cast<int>(get_u32(&head[14]));
  const int nt = static_cast<int>(get_u32(&head[18]));
  geom.box.lo.x = get_f64(&head[22]);
  geom.box.hi.x = get_f64(&head[30]);
  geom.box.lo.y = get_f64(&head[38]);
  geom.box.hi.y = get_f64(&head[46]);
  geom.box.lo.z = get_f64(&head[54]);
  geom.box.hi.z = get_f64(&head[62]);
  const double t_begin = get_f64(&head[70]);
  const double t_end = get_f64(&head[78]);
  geom.periodic = {(flags & 0x02u) != 0, (flags & 0x04u) != 0,
                   (flags & 0x08u) != 0};

  SampledField field(geom, t_begin, t_end, nt, has_pressure);

  const std::size_t nnode = geom.node_count();
  const std::size_t comps = has_pressure ? 4 : 3;
  const std::size_t expected =
      kHeaderSize + static_cast<std::size_t>(nt) * comps * nnode * 8;
  if (file_size != expected)
    throw FormatError("payload size mismatch, expected " +
                          std::to_string(expected) + " bytes, file has " +
                          std::to_string(file_size),
                      file_size < expected ? file_size : expected);

  std::vector<unsigned char> buf(nnode * 8);
  for (int k = 0; k < nt; ++k) {
    for (std::size_t c = 0; c < comps; ++c) {
      in.read(reinterpret_cast<char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
      for (std::size_t i = 0; i < nnode; ++i) {
        const double v = get_f64(&buf[i * 8]);
        if (c < 3)
          field.u(static_cast<int>(c), k, i) = v;
        else
          field.p(k, i) = v;
      }
    }
  }
  field.validate();
  return field;
}

void save_field(const SampledField& field, const std::string& path) {
  const GridGeometry& geom = field.geometry();
  std::vector<unsigned char> buf;
  buf.reserve(kHeaderSize);
  buf.insert(buf.end(), kMagic, kMagic + 4);
  buf.push_back(kVersion);
  std::uint8_t flags = field.has_pressure() ? 0x01u : 0x00u;
  if (geom.periodic[0]) flags |= 0x02u;
  if (geom.periodic[1]) flags |= 0x04u;
  if (geom.periodic[2]) flags |= 0x08u;
  buf.push_back(flags);
  put_u32(buf, static_cast<std::uint32_t>(geom.nx));
  put_u32(buf, static_cast<std::uint32_t>(geom.ny));
  put_u32(buf, static_cast<std::uint32_t>(geom.nz));
  put_u32(buf, static_cast<std::uint32_t>(field.nt()));
  put_f64(buf, geom.box.lo.x);
  put_f64(buf, geom.box.hi.x);
  put_f64(buf, geom.box.lo.y);
  put_f64(buf, geom.box.hi.y);
  put_f64(buf, geom.box.lo.z);
  put_f64(buf, geom.box.hi.z);
  put_f64(buf, field.t_begin());
  put_f64(buf, field.t_end());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("cannot open output file: " + path);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));

  const std::size_t nnode = geom.node_count();
  std::vector<unsigned char> payload;
  payload.reserve(nnode * 8);
  for (int k = 0; k < field.nt(); ++k) {
    const int comps = field.has_pressure() ? 4 : 3;
    for (int c = 0; c < comps; ++c) {
      payload.clear();
      for (std::size_t i = 0; i < nnode; ++i)
        put_f64(payload, c < 3 ? field.u(c, k, i) : field.p(k, i));
      out.write(reinterpret_cast<const char*>(payload.data()),
                static_cast<std::streamsize>(payload.size()));
    }
  }
  if (!out) throw DomainError("write failed: " + path);
}

}  // namespace nssl
