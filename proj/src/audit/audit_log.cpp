#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <algorithm>
#include <fstream>

#include "affect/audit.hpp"

namespace affect::audit {

namespace {

std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  std::size_t n = 0;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    n += static_cast<std::size_t>(std::count(buf, buf + in.gcount(), '\n'));
  }
  return n;
}

void write_all(int fd, std::string_view data, const std::filesystem::path& path) {
  // O_APPEND positions each write(2) at the end; loop only on short writes.
  while (!data.empty()) {
    const auto n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw AuditWriteError("write to " + path.string() + " failed: " + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

AuditLog::AuditLog(std::filesystem::path path, bool sync) : path_(std::move(path)), sync_(sync) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  if (ec) throw AuditWriteError("cannot create " + path_.parent_path().string() + ": " + ec.message());
  lines_ = count_lines(path_);
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw AuditWriteError("cannot open " + path_.string() + ": " + std::strerror(errno));
}

AuditLog::~AuditLog() {
  if (fd_ >= 0) ::close(fd_);
}

std::size_t AuditLog::append(std::string_view canonical_bytes) {
  if (canonical_bytes.find('\n') != std::string_view::npos) throw AuditWriteError("audit record contains a newline");
  std::string line;
  line.reserve(canonical_bytes.size() + 1);
  line.append(canonical_bytes);
  line.push_back('\n');

  std::lock_guard lock(mutex_);
  write_all(fd_, line, path_);
  if (sync_ && ::fsync(fd_) != 0 && errno != EINVAL) {
    throw AuditWriteError("fsync " + path_.string() + " failed: " + std::strerror(errno));
  }
  return ++lines_;
}

std::size_t AuditLog::lines() const {
  std::lock_guard lock(mutex_);
  return lines_;
}

std::size_t append_audit_log(std::string_view canonical_bytes, const std::filesystem::path& log_path) {
  AuditLog log(log_path);
  return log.append(canonical_bytes);
}

std::filesystem::path store_event_file(std::string_view canonical_bytes, const std::string& txid,
                                       const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw AuditWriteError("cannot create " + dir.string() + ": " + ec.message());
  const auto path = dir / (txid + ".json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(canonical_bytes.data(), static_cast<std::streamsize>(canonical_bytes.size()));
  if (!out) throw AuditWriteError("cannot write " + path.string());
  return path;
}

}  // namespace affect::audit
