#pragma once

namespace segsamp {

// Serial is the reference path kept for testing; Parallel uses OpenMP.
enum class Exec { Serial, Parallel };

void set_thread_count(int n);
int thread_count();

}  // namespace segsamp
