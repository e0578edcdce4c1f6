#include "sky/page_io.hpp"

#include <filesystem>

namespace sky {

PageFile::PageFile(const std::string& path, std::uint32_t page_size, bool truncate)
    : path_(path), page_size_(page_size) {
  if (page_size_ < 32) fail(Errc::bad_params, "page size too small");
  auto mode = std::ios::binary | std::ios::in | std::ios::out;
  if (truncate || !std::filesystem::exists(path)) mode |= std::ios::trunc;
  file_.open(path, mode);
  if (!file_) fail(Errc::io_error, "cannot open page file '" + path + "'");
  file_.seekg(0, std::ios::end);
  const auto bytes = std::uint64_t(file_.tellg());
  if (bytes % page_size_ != 0) fail(Errc::corrupt_header, "file size is not page aligned");
  page_count_ = bytes / page_size_;
}

PageFile::~PageFile() = default;

void PageFile::read_page(std::uint64_t page_id, std::span<std::byte> out) {
  if (out.size() != page_size_) fail(Errc::bad_params, "read buffer != page size");
  if (page_id >= page_count_) {
    std::fill(out.begin(), out.end(), std::byte(0));
    return;  // unwritten page; no physical read happens
  }
  file_.seekg(std::streamoff(page_id * page_size_));
  file_.read(reinterpret_cast<char*>(out.data()), page_size_);
  if (!file_) fail(Errc::io_error, "read failed at page " + std::to_string(page_id));
  ++io_.reads;
}

void PageFile::write_page(std::uint64_t page_id, std::span<const std::byte> data) {
  if (data.size() != page_size_) fail(Errc::bad_params, "write buffer != page size");
  if (page_id > page_count_) {
    // Fill the gap so the file stays page aligned.
    std::vector<std::byte> zero(page_size_, std::byte(0));
    for (std::uint64_t p = page_count_; p < page_id; ++p) {
      file_.seekp(std::streamoff(p * page_size_));
      file_.write(reinterpret_cast<const char*>(zero.data()), page_size_);
    }
  }
  file_.seekp(std::streamoff(page_id * page_size_));
  file_.write(reinterpret_cast<const char*>(data.data()), page_size_);
  if (!file_) fail(Errc::io_error, "write failed at page " + std::to_string(page_id));
  page_count_ = std::max(page_count_, page_id + 1);
  ++io_.writes;
}

PageCache::PageCache(PageFile& file, std::size_t capacity_pages) : file_(file), capacity_(capacity_pages) {
  if (capacity_ < 1) fail(Errc::bad_params, "cache needs at least one page");
}

PageCache::~PageCache() {
  try {
    flush();
  } catch (...) {
    // Destructor must not throw; callers that care flush explicitly.
  }
}

PageCache::Frame& PageCache::fetch(std::uint64_t page_id) {
  if (auto it = index_.find(page_id); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);  // touch
    return *it->second;
  }
  if (lru_.size() >= capacity_) evict_one();
  lru_.push_front(Frame{page_id, false, std::vector<std::byte>(file_.page_size())});
  index_[page_id] = lru_.begin();
  file_.read_page(page_id, lru_.front().data);
  return lru_.front();
}

void PageCache::evict_one() {
  Frame& victim = lru_.back();
  if (victim.dirty) file_.write_page(victim.page_id, victim.data);
  index_.erase(victim.page_id);
  lru_.pop_back();
}

void PageCache::read(std::uint64_t page_id, std::span<std::byte> out) {
  Frame& f = fetch(page_id);
  std::copy(f.data.begin(), f.data.end(), out.begin());
}

void PageCache::write(std::uint64_t page_id, std::span<const std::byte> data) {
  Frame& f = fetch(page_id);
  std::copy(data.begin(), data.end(), f.data.begin());
  f.dirty = true;
}

void PageCache::update(std::uint64_t page_id, std::size_t offset, std::span<const std::byte> data) {
  if (offset + data.size() > file_.page_size()) fail(Errc::bad_params, "update spills past the page");
  Frame& f = fetch(page_id);
  std::copy(data.begin(), data.end(), f.data.begin() + std::ptrdiff_t(offset));
  f.dirty = true;
}

void PageCache::flush() {
  for (Frame& f : lru_) {
    if (f.dirty) {
      file_.write_page(f.page_id, f.data);
      f.dirty = false;
    }
  }
}

void PageCache::drop() {
  flush();
  lru_.clear();
  index_.clear();
}

}  // namespace sky
