// Fixed-size page files and the write-back LRU page cache all disk-backed
// structures read and write through. Physical I/O is counted so that cache
// and bulk-loading effects are measurable.
#pragma once

#include <cstdint>
#include <fstream>
#include <list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sky/error.hpp"

namespace sky {

struct IoCounter {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
};

// Raw random-access page I/O on one file. Pages are zero-based; reading a
// page past the current end yields zeros (the file grows on write).
class PageFile {
 public:
  PageFile(const std::string& path, std::uint32_t page_size, bool truncate);
  ~PageFile();

  PageFile(const PageFile&) = delete;
  PageFile& operator=(const PageFile&) = delete;

  std::uint32_t page_size() const { return page_size_; }
  std::uint64_t page_count() const { return page_count_; }
  const std::string& path() const { return path_; }

  void read_page(std::uint64_t page_id, std::span<std::byte> out);
  void write_page(std::uint64_t page_id, std::span<const std::byte> data);

  const IoCounter& io() const { return io_; }
  void reset_io() { io_ = IoCounter{}; }

 private:
  std::string path_;
  std::fstream file_;
  std::uint32_t page_size_;
  std::uint64_t page_count_ = 0;
  IoCounter io_;
};

// Fixed-capacity LRU cache over a PageFile, write-back: dirty frames are
// flushed when evicted or on flush(). All access is by copy, so callers
// never hold pointers into frames across other cache calls.
class PageCache {
 public:
  PageCache(PageFile& file, std::size_t capacity_pages);
  ~PageCache();

  void read(std::uint64_t page_id, std::span<std::byte> out);
  void write(std::uint64_t page_id, std::span<const std::byte> data);
  // Read-modify-write of a byte range within one page.
  void update(std::uint64_t page_id, std::size_t offset, std::span<const std::byte> data);

  void flush();
  // Flushes and empties the cache; the next access hits the disk again.
  void drop();

  std::size_t capacity() const { return capacity_; }
  const IoCounter& io() const { return file_.io(); }
  void reset_io() { file_.reset_io(); }
  PageFile& file() { return file_; }

 private:
  struct Frame {
    std::uint64_t page_id = 0;
    bool dirty = false;
    std::vector<std::byte> data;
  };

  // Returns the frame for page_id, faulting it in (and evicting the
  // least-recently-used frame) as needed.
  Frame& fetch(std::uint64_t page_id);
  void evict_one();

  PageFile& file_;
  std::size_t capacity_;
  std::list<Frame> lru_;  // front = most recent
  std::unordered_map<std::uint64_t, std::list<Frame>::iterator> index_;
};

}  // namespace sky
