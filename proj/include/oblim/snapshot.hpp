#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "oblim/model.hpp"

namespace oblim {

using AnyState = std::variant<CompressibleState, IncompressibleState>;

/// Binary layout, all little-endian:
///   "OBM1" | u16 version | u8 dim | u8 kind | u32 n | f64 box_length
///   | f64 epsilon | f64 time | u32 components | f64 payload... | u32 crc32
/// kind 0 stores phi, u, eta, tau; kind 1 stores u, eta, tau, pi. Tensors use
/// the packed symmetric slot order. The checksum covers the payload only.
inline constexpr std::uint16_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 40;

std::vector<std::uint8_t> encode_snapshot(const CompressibleState& s);
std::vector<std::uint8_t> encode_snapshot(const IncompressibleState& s);
/// Throws IoError on bad magic, unsupported version, length mismatch or a
/// checksum failure. The grid gets the default dealias fraction.
AnyState decode_snapshot(const std::vector<std::uint8_t>& bytes);

void save_snapshot(const CompressibleState& s, const std::filesystem::path& path);
void save_snapshot(const IncompressibleState& s, const std::filesystem::path& path);
AnyState load_snapshot(const std::filesystem::path& path);

}  // namespace oblim
