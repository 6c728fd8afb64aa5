#include <csignal>
#include <iostream>
#include <thread>

#include "cli.hpp"

int main(int argc, char** argv) {
  // Route SIGINT/SIGTERM to a watcher thread so shutdown runs outside a
  // signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread([signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    lcaas::cli::stop_serving();
  }).detach();

  std::vector<std::string> args(argv + 1, argv + argc);
  return lcaas::cli::run(args, std::cout, std::cerr);
}
