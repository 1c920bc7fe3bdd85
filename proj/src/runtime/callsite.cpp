#include "vprec/callsite.hpp"

#include <dlfcn.h>
#include <execinfo.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <vector>

namespace vprec {

namespace {

std::string short_name(const char* path) {
  std::string name = path == nullptr ? "" : path;
  if (const auto slash = name.rfind('/'); slash != std::string::npos) name.erase(0, slash + 1);
  if (name.empty()) {
    // The main program may be reported without a path.
    std::array<char, 4096> buf{};
    const ssize_t n = ::readlink("/proc/self/exe", buf.data(), buf.size() - 1);
    if (n > 0) {
      name.assign(buf.data(), static_cast<std::size_t>(n));
      if (const auto slash = name.rfind('/'); slash != std::string::npos) name.erase(0, slash + 1);
    }
  }
  // Names appear inside space-separated key=value records.
  std::replace_if(name.begin(), name.end(),
                  [](char c) { return c == ' ' || c == '\t' || c == '=' || c == '\n'; }, '_');
  return name.empty() ? "?" : name;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t size) noexcept {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= kFnvPrime;
  }
}

}  // namespace

CodeLocation locate_address(const void* address) {
  Dl_info info{};
  if (::dladdr(address, &info) != 0 && info.dli_fbase != nullptr) {
    const auto base = reinterpret_cast<std::uintptr_t>(info.dli_fbase);
    return {short_name(info.dli_fname), reinterpret_cast<std::uintptr_t>(address) - base};
  }
  return {"?", reinterpret_cast<std::uintptr_t>(address)};
}

std::uint64_t site_hash(std::span<const CodeLocation> frames, MathFunction f) noexcept {
  std::uint64_t h = kFnvOffset;
  for (const auto& frame : frames) {
    fnv_bytes(h, frame.object.data(), frame.object.size());
    const unsigned char sep = 0;
    fnv_bytes(h, &sep, 1);
    std::array<unsigned char, 8> le{};
    for (std::size_t i = 0; i < le.size(); ++i) le[i] = static_cast<unsigned char>(frame.offset >> (8 * i));
    fnv_bytes(h, le.data(), le.size());
  }
  const auto fn = name(f);
  fnv_bytes(h, fn.data(), fn.size());
  return h;
}

SiteResolver::SiteResolver(int stack_frames)
    : stack_frames_(std::clamp(stack_frames, 0, kMaxStackFrames)) {}

CodeLocation SiteResolver::locate_cached(const void* address) {
  {
    std::shared_lock lock(mutex_);
    if (const auto it = locations_.find(address); it != locations_.end()) return it->second;
  }
  CodeLocation loc = locate_address(address);
  std::unique_lock lock(mutex_);
  return locations_.try_emplace(address, std::move(loc)).first->second;
}

CallSiteId SiteResolver::resolve(const void* return_address, MathFunction f) {
  if (stack_frames_ == 0) {
    const std::uint64_t key =
        reinterpret_cast<std::uintptr_t>(return_address) ^ (static_cast<std::uint64_t>(f) << 58);
    {
      std::shared_lock lock(mutex_);
      if (const auto it = sites_.find(key); it != sites_.end()) return it->second;
    }
    const CodeLocation loc = locate_cached(return_address);
    CallSiteId id{loc.object, loc.offset, site_hash(std::span(&loc, 1), f)};
    std::unique_lock lock(mutex_);
    return sites_.try_emplace(key, std::move(id)).first->second;
  }

  std::array<void*, kMaxStackFrames + 32> raw{};
  const int depth = ::backtrace(raw.data(), static_cast<int>(raw.size()));
  // Skip the resolver's own frames: the walk starts at the return address.
  int start = 0;
  while (start < depth && raw[static_cast<std::size_t>(start)] != return_address) ++start;
  std::vector<CodeLocation> frames;
  if (start == depth) {
    frames.push_back(locate_cached(return_address));
  } else {
    for (int i = start; i < depth && static_cast<int>(frames.size()) < stack_frames_; ++i) {
      frames.push_back(locate_cached(raw[static_cast<std::size_t>(i)]));
    }
  }
  return {frames.front().object, frames.front().offset, site_hash(frames, f)};
}

}  // namespace vprec
