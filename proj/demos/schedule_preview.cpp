// Prints the first windows of every backoff schedule side by side.
//
//   $ schedule_preview [count]

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "cwsim/policy.hpp"

int main(int argc, char** argv) {
  size_t count = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 16;
  const char* kinds[] = {"beb", "lb", "llb", "stb", "tstb", "llb_star",
                         "lb_star"};
  std::printf("%-8s", "window");
  for (const char* k : kinds) std::printf("%10s", k);
  std::printf("\n");

  std::vector<cwsim::WindowSchedule> schedules;
  for (const char* k : kinds)
    schedules.emplace_back(cwsim::BackoffPolicy::parse(k));

  for (size_t i = 0; i < count; ++i) {
    std::printf("%-8zu", i);
    for (auto& s : schedules) std::printf("%10llu", (unsigned long long)s.next());
    std::printf("\n");
  }
  return 0;
}
