// SPDX-License-Identifier: Apache-2.0
#include "irs/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <utility>

namespace irs {
namespace {

std::mutex g_mutex;
std::atomic<std::size_t> g_count{0};

WarningSink& sink() {
  static WarningSink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return s;
}

}  // namespace

void warn(std::string_view message) {
  ++g_count;
  std::lock_guard lock(g_mutex);
  if (sink()) sink()(message);
}

WarningSink set_warning_sink(WarningSink s) {
  std::lock_guard lock(g_mutex);
  return std::exchange(sink(), std::move(s));
}

std::size_t warning_count() { return g_count.load(); }

}  // namespace irs
