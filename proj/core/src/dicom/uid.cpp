#include "iodeep/dicom/uid.hpp"

#include <algorithm>
#include <random>

namespace iodeep::dicom {

bool is_valid_uid(std::string_view uid) noexcept {
  if (uid.empty() || uid.size() > 64) return false;
  std::size_t start = 0;
  while (start <= uid.size()) {
    auto dot = uid.find('.', start);
    if (dot == std::string_view::npos) dot = uid.size();
    const auto component = uid.substr(start, dot - start);
    if (component.empty()) return false;
    if (!std::all_of(component.begin(), component.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return false;
    }
    if (component.size() > 1 && component.front() == '0') return false;
    start = dot + 1;
  }
  return true;
}

__extension__ typedef unsigned __int128 u128;

std::string generate_uid() {
  thread_local std::mt19937_64 rng{[] {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd()};
    return std::mt19937_64(seq);
  }()};
  // 2.25 root: decimal form of a random 128-bit value, as for UUID-derived UIDs.
  u128 v = (static_cast<u128>(rng()) << 64) | rng();
  v &= ~(static_cast<u128>(0xF000) << 64);
  v |= static_cast<u128>(0x4000) << 64;
  std::string digits;
  do {
    digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  } while (v != 0);
  std::reverse(digits.begin(), digits.end());
  return "2.25." + digits;
}

std::string make_uid(std::string_view root, unsigned long long suffix) {
  return std::string(root) + "." + std::to_string(suffix);
}

}  // namespace iodeep::dicom
