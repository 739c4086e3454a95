#include "memory.hpp"

#include <algorithm>

namespace lcfi::vm::detail {

std::uint64_t Arena::allocate(std::uint64_t size, std::uint64_t align, Region region) {
  align = std::max<std::uint64_t>(align, 16);
  const std::uint64_t base = (next_ + align - 1) / align * align;
  Allocation a;
  a.base = base;
  a.size = size;
  a.region = region;
  a.bytes.assign(size, 0);
  next_ = base + std::max<std::uint64_t>(size, 1) + kGap;
  last_ = nullptr;
  records_.emplace(base, std::move(a));
  return base;
}

void Arena::release(std::uint64_t base) {
  auto it = records_.find(base);
  if (it == records_.end()) return;
  it->second.live = false;
  it->second.bytes.clear();
  it->second.bytes.shrink_to_fit();
  if (last_ == &it->second) last_ = nullptr;
}

Allocation* Arena::find(std::uint64_t addr, std::uint64_t size) {
  auto fits = [&](const Allocation& a) {
    return a.live && addr >= a.base && addr - a.base <= a.size && size <= a.size - (addr - a.base);
  };
  if (last_ && fits(*last_)) return last_;
  auto it = records_.upper_bound(addr);
  if (it == records_.begin()) return nullptr;
  --it;
  if (!fits(it->second)) return nullptr;
  last_ = &it->second;
  return last_;
}

Allocation* Arena::record(std::uint64_t base) {
  auto it = records_.find(base);
  return it == records_.end() ? nullptr : &it->second;
}

std::uint8_t* Arena::access(std::uint64_t addr, std::uint64_t size) {
  Allocation* a = find(addr, size);
  if (!a) return nullptr;
  if (size == 0) return a->bytes.data();
  return a->bytes.data() + (addr - a->base);
}

bool Arena::read_cstring(std::uint64_t addr, std::string& out) {
  Allocation* a = find(addr, 1);
  if (!a) return false;
  out.clear();
  for (std::uint64_t off = addr - a->base; off < a->size; ++off) {
    const auto c = a->bytes[off];
    if (c == 0) return true;
    out.push_back(static_cast<char>(c));
  }
  return false;
}

}  // namespace lcfi::vm::detail
