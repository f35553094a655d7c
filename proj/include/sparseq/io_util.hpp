#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace sparseq {

// FNV-1a over the bytes of a string, printed as 16 hex digits. Used for
// config fingerprints; stability across runs matters, cryptography does not.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

// Canonical "key=value\n" rendering, keys sorted, and its fingerprint.
std::string canonical_text(const std::map<std::string, std::string>& kv);
inline std::string fingerprint(const std::map<std::string, std::string>& kv) {
  return to_hex(fnv1a(canonical_text(kv)));
}

// Whole-file read; throws on failure.
std::string read_file(const std::string& path);

// Write-temp-then-rename so concurrent readers never see partial files.
void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace sparseq
