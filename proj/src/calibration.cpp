#include "thetajoin/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <fstream>
#include <random>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include "thetajoin/errors.hpp"

namespace thetajoin {

std::vector<double> isotonic_fit(std::span<const double> y, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != y.size()) throw ParameterError("weights must match values");
  struct Block {
    double mean, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) throw ParameterError("weights must be positive");
    blocks.push_back({y[i], w, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const auto b = blocks.back();
      blocks.pop_back();
      auto& a = blocks.back();
      a.mean = (a.mean * a.weight + b.mean * b.weight) / (a.weight + b.weight);
      a.weight += b.weight;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point a, Clock::time_point b) { return std::chrono::duration<double>(b - a).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

constexpr std::size_t kChunk = 1 << 20;

struct Fd {
  int fd = -1;
  explicit Fd(int f) : fd(f) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

void write_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    const auto w = ::send(fd, data, n, MSG_NOSIGNAL);
    if (w <= 0) throw Error(std::string("loopback send failed: ") + std::strerror(errno));
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

// Accepts connections one at a time and drains each to EOF before closing
// it. Probe payloads per connection fit in the socket buffers, so clients
// never wait on a connection the sink has not reached yet.
class LoopbackSink {
 public:
  LoopbackSink() : listener_(::socket(AF_INET, SOCK_STREAM, 0)) {
    if (listener_.fd < 0) throw Error("cannot create loopback socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(listener_.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener_.fd, 256) != 0)
      throw Error("cannot listen on loopback");
    socklen_t len = sizeof addr;
    ::getsockname(listener_.fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { serve(); });
  }
  ~LoopbackSink() {
    stop_ = true;
    // Wake the accept call.
    try {
      Fd c(connect());
    } catch (...) {
    }
    thread_.join();
  }

  int connect() const {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw Error("cannot create loopback socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port_);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      ::close(fd);
      throw Error(std::string("loopback connect failed: ") + std::strerror(errno));
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
  }

 private:
  void serve() {
    while (!stop_) {
      const int fd = ::accept(listener_.fd, nullptr, nullptr);
      if (fd < 0) continue;
      if (stop_) {
        ::close(fd);
        break;
      }
      while (::recv(fd, buf_.data(), buf_.size(), 0) > 0) {
      }
      ::close(fd);
    }
  }

  Fd listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
  std::vector<char> buf_ = std::vector<char>(kChunk);
  std::thread thread_;
};

// Sends `bytes` over each of `connections` fresh connections, then waits
// for the sink to close them.
double loopback_transfer(const LoopbackSink& sink, std::size_t connections, std::size_t bytes,
                         const std::vector<char>& payload) {
  const auto t0 = Clock::now();
  std::vector<int> fds;
  try {
    for (std::size_t c = 0; c < connections; ++c) fds.push_back(sink.connect());
    for (int fd : fds) {
      for (std::size_t sent = 0; sent < bytes; sent += kChunk)
        write_all(fd, payload.data(), std::min(kChunk, bytes - sent));
      ::shutdown(fd, SHUT_WR);
    }
    char b;
    for (int fd : fds) {
      while (::recv(fd, &b, 1, 0) > 0) {
      }
    }
  } catch (...) {
    for (int fd : fds) ::close(fd);
    throw;
  }
  for (int fd : fds) ::close(fd);
  return seconds(t0, Clock::now());
}

void check_clock() {
  using P = Clock::period;
  if (static_cast<double>(P::num) / static_cast<double>(P::den) > 1e-6)
    throw Error("steady clock resolution is coarser than a microsecond");
  const auto a = Clock::now();
  auto b = Clock::now();
  for (int i = 0; i < 1000 && b == a; ++i) b = Clock::now();
  if (b == a) throw Error("steady clock does not advance");
}

double positive(double x, const char* what) {
  if (!(x > 0.0)) throw Error(std::string("timer could not resolve the ") + what + " probe");
  return x;
}

}  // namespace

CalibrationRun calibrate(const CalibrationOptions& options) {
  check_clock();
  CalibrationRun run;
  const std::size_t repeats = options.quick ? 1 : std::max<std::size_t>(1, options.repeats);
  run.spill_sizes = options.quick ? std::vector<std::uint64_t>{1 << 20, 4 << 20, 16 << 20}
                                  : std::vector<std::uint64_t>{1 << 20, 2 << 20, 4 << 20, 8 << 20, 16 << 20, 32 << 20, 64 << 20};
  run.fanouts = options.quick ? std::vector<std::uint64_t>{1, 4, 16} : std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32, 64};

  std::filesystem::create_directories(options.scratch_dir);
  const auto need = 2 * run.spill_sizes.back();
  if (std::filesystem::space(options.scratch_dir).available < need)
    throw Error("insufficient disk space in " + options.scratch_dir.string() + " for calibration");

  std::vector<char> payload(kChunk);
  std::mt19937_64 rng(42);
  for (auto& c : payload) c = static_cast<char>(rng());

  // Spill writes and read-back. One unmeasured warm-up, then passes that
  // sweep every size so slow spells spread across knots.
  const auto stem = "thetajoin-calibrate-" + std::to_string(::getpid()) + "-";
  std::size_t files = 0;
  std::vector<double> read_rates;
  std::vector<std::vector<double>> w(run.spill_sizes.size());
  std::vector<char> buf(kChunk);
  auto spill = [&](std::uint64_t size) {
    const auto path = options.scratch_dir / (stem + std::to_string(files++));
    const auto t0 = Clock::now();
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      for (std::uint64_t done = 0; done < size; done += kChunk)
        out.write(payload.data(), static_cast<std::streamsize>(std::min<std::uint64_t>(kChunk, size - done)));
      out.flush();
      if (!out) {
        std::filesystem::remove(path);
        throw Error("calibration write failed in " + options.scratch_dir.string());
      }
    }
    const auto t1 = Clock::now();
    {
      std::ifstream in(path, std::ios::binary);
      while (in.read(buf.data(), static_cast<std::streamsize>(buf.size())) || in.gcount() > 0) {
      }
    }
    const auto t2 = Clock::now();
    std::filesystem::remove(path);
    return std::pair{seconds(t0, t1), seconds(t1, t2)};
  };
  spill(run.spill_sizes.back());
  for (std::size_t r = 0; r < repeats; ++r)
    for (std::size_t i = 0; i < run.spill_sizes.size(); ++i) {
      const auto size = static_cast<double>(run.spill_sizes[i]);
      const auto [write, read] = spill(run.spill_sizes[i]);
      w[i].push_back(positive(write, "write") / size);
      read_rates.push_back(positive(read, "read") / size);
    }
  for (auto& v : w) run.write_seconds_per_byte.push_back(median(v));
  run.read_seconds_per_byte = median(read_rates);

  // Loopback copies, same pattern.
  LoopbackSink sink;
  const std::size_t bulk = options.quick ? (8u << 20) : (32u << 20);
  const std::size_t small = 4096;
  loopback_transfer(sink, 1, bulk, payload);
  loopback_transfer(sink, run.fanouts.back(), small, payload);
  std::vector<double> copy;
  std::vector<std::vector<double>> t(run.fanouts.size());
  for (std::size_t r = 0; r < repeats; ++r) {
    copy.push_back(positive(loopback_transfer(sink, 1, bulk, payload), "copy") / static_cast<double>(bulk));
    for (std::size_t i = 0; i < run.fanouts.size(); ++i) {
      // Enough rounds that one timing spans a few hundred connections.
      const auto rounds = std::max<std::uint64_t>(2, 512 / run.fanouts[i]);
      double total = 0.0;
      for (std::uint64_t k = 0; k < rounds; ++k) total += loopback_transfer(sink, run.fanouts[i], small, payload);
      t[i].push_back(positive(total, "fan-out") / static_cast<double>(rounds));
    }
  }
  run.copy_seconds_per_byte = median(copy);
  for (std::size_t i = 0; i < run.fanouts.size(); ++i) {
    const auto n = static_cast<double>(run.fanouts[i]);
    const double per = (median(t[i]) - run.copy_seconds_per_byte * static_cast<double>(small) * n) / n;
    run.connection_seconds.push_back(std::max(per, 1e-9));
  }

  auto& prof = run.profile;
  prof.c1 = run.read_seconds_per_byte;
  prof.c2 = run.copy_seconds_per_byte;
  const auto p_fit = isotonic_fit(run.write_seconds_per_byte);
  const auto q_fit = isotonic_fit(run.connection_seconds);
  std::vector<std::pair<double, double>> pk, qk;
  for (std::size_t i = 0; i < p_fit.size(); ++i) pk.emplace_back(static_cast<double>(run.spill_sizes[i]), p_fit[i]);
  for (std::size_t i = 0; i < q_fit.size(); ++i) qk.emplace_back(static_cast<double>(run.fanouts[i]), q_fit[i]);
  prof.p = PiecewiseLinear<double>(pk);
  prof.q = PiecewiseLinear<double>(qk);
  prof.block_size = options.block_size;
  prof.map_slots = std::max<std::uint64_t>(1, options.map_slots);
  prof.merge_c = prof.c1;
  prof.low_confidence = options.quick;
  prof.label = options.quick ? "measured (quick)" : "measured";
  prof.validate();
  return run;
}

}  // namespace thetajoin
