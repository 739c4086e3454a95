#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lcfi::vm::detail {

enum class Region : std::uint8_t { Global, Stack, Heap, Handle };

struct Allocation {
  std::uint64_t base = 0;
  std::uint64_t size = 0;
  Region region = Region::Heap;
  bool live = true;
  std::vector<std::uint8_t> bytes;
};

// Flat address space of allocation records. Addresses are never reused and
// neighbouring records are separated by an unmapped gap.
class Arena {
 public:
  static constexpr std::uint64_t kFirstAddress = 0x1000;
  static constexpr std::uint64_t kGap = 16;

  std::uint64_t allocate(std::uint64_t size, std::uint64_t align, Region region);
  // Marks the record dead; later accesses fail.
  void release(std::uint64_t base);

  // Live record containing [addr, addr + size), or nullptr.
  Allocation* find(std::uint64_t addr, std::uint64_t size);
  // Record whose base is exactly `base`, live or not.
  Allocation* record(std::uint64_t base);

  // Bytes at [addr, addr + size) when fully inside one live record, else nullptr.
  std::uint8_t* access(std::uint64_t addr, std::uint64_t size);

  // NUL-terminated string starting at addr; false when it runs off its record.
  bool read_cstring(std::uint64_t addr, std::string& out);

 private:
  std::map<std::uint64_t, Allocation> records_;
  std::uint64_t next_ = kFirstAddress;
  Allocation* last_ = nullptr;
};

}  // namespace lcfi::vm::detail
