#pragma once

#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>

#include "vprec/math_function.hpp"

namespace vprec {

/// A code address expressed relative to the mapped object containing it, so
/// it is stable under address-space layout randomization.
struct CodeLocation {
  std::string object;  // short (base) name; "?" when unmapped
  std::uint64_t offset = 0;  // from the object's load base, or absolute for "?"

  friend bool operator==(const CodeLocation&, const CodeLocation&) = default;
};

struct CallSiteId {
  std::string object;
  std::uint64_t offset = 0;
  std::uint64_t hash = 0;

  friend bool operator==(const CallSiteId&, const CallSiteId&) = default;
};

/// Maps an address to (object, offset) through the dynamic loader's view of
/// the process memory map.
CodeLocation locate_address(const void* address);

/// 64-bit FNV-1a over the frame locations followed by the function name.
std::uint64_t site_hash(std::span<const CodeLocation> frames, MathFunction f) noexcept;

/// Thread-safe, memoizing call-site resolver. With stack_frames == 0 only the
/// immediate return address identifies a site; with K > 0 the top K frames
/// starting at the return address are hashed together.
class SiteResolver {
 public:
  static constexpr int kMaxStackFrames = 64;

  explicit SiteResolver(int stack_frames = 0);

  CallSiteId resolve(const void* return_address, MathFunction f);

  int stack_frames() const noexcept { return stack_frames_; }

 private:
  CodeLocation locate_cached(const void* address);

  int stack_frames_;
  std::shared_mutex mutex_;
  std::unordered_map<const void*, CodeLocation> locations_;
  std::unordered_map<std::uint64_t, CallSiteId> sites_;  // keyed by address ^ function
};

}  // namespace vprec
