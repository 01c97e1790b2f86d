#pragma once

#include <mutex>

namespace choquard {

// FFTW's planner is not thread safe; every plan creation and destruction
// takes this lock.
std::mutex& fftw_planner_mutex();

}  // namespace choquard
