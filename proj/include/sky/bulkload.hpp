// VAMSplit bulk construction of the R-tree: recursive near-median splits
// along the maximum-variance dimension, with external selection via sampled
// pivots and cache-backed partitioning for runs that exceed the memory
// budget.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sky/catalog.hpp"
#include "sky/page_io.hpp"
#include "sky/random.hpp"
#include "sky/rtree.hpp"

namespace sky {

struct VamSplitParams {
  std::size_t leaf_capacity = 64;     // records per leaf page
  std::uint16_t internal_fanout = 0;  // 0 = fill internal pages to capacity
  std::size_t sample_size = 1024;     // pivot sample
  std::size_t cache_pages = 64;       // partition cache capacity
  std::size_t memory_budget = std::size_t(64) << 20;  // switch to in-memory below this
  std::uint64_t seed = 42;
  std::uint32_t page_size = 4096;
};

struct SplitEvent {
  std::size_t dimension = 0;
  std::uint64_t n = 0;
  std::uint64_t left = 0;
  double pivot = 0.0;
  std::vector<double> variances;  // per dimension, at split time
  IoCounter io;                   // cumulative scratch I/O after the split
};

struct BuildLog {
  std::vector<SplitEvent> splits;
  IoCounter scratch_io;
  std::uint64_t leaf_pages = 0;
};

// One partition living on the scratch file: `count` fixed-size records
// (k coordinates + record id) starting at `first_page`, packed
// records-per-page with no sharing between runs.
class ScratchSpace;

class ExternalRun {
 public:
  ExternalRun() = default;
  ExternalRun(ScratchSpace* space, std::uint64_t first_page, std::uint64_t count);

  std::uint64_t count() const { return count_; }
  std::uint64_t bytes() const;
  bool valid() const { return space_ != nullptr; }

  // Record access by slot; reads go through the page cache.
  void read_record(std::uint64_t slot, std::span<double> coords, std::uint64_t& id) const;
  // Returns this run's pages to the scratch free list.
  void release();

  ScratchSpace* space() const { return space_; }
  std::uint64_t first_page() const { return first_page_; }

 private:
  ScratchSpace* space_ = nullptr;
  std::uint64_t first_page_ = 0;
  std::uint64_t count_ = 0;
};

// Scratch file manager: page-aligned runs of fixed-size records with a
// first-fit free list, all I/O through one counted page cache.
class ScratchSpace {
 public:
  ScratchSpace(const std::string& path, std::uint16_t k, std::uint32_t page_size, std::size_t cache_pages);
  ~ScratchSpace();

  std::uint16_t k() const { return k_; }
  std::size_t record_bytes() const { return record_bytes_; }
  std::uint64_t records_per_page() const { return per_page_; }

  ExternalRun allocate_run(std::uint64_t count);
  void free_pages(std::uint64_t first_page, std::uint64_t count_pages);
  std::uint64_t pages_for(std::uint64_t count) const;

  // Sequential append cursor for filling a freshly allocated run.
  class Writer {
   public:
    Writer(ScratchSpace& space, const ExternalRun& run);
    void append(std::span<const double> coords, std::uint64_t id);
    std::uint64_t written() const { return written_; }

   private:
    ScratchSpace& space_;
    std::uint64_t first_page_, capacity_, written_ = 0;
  };

  void read_record(std::uint64_t first_page, std::uint64_t slot, std::span<double> coords,
                   std::uint64_t& id);

  const IoCounter& io() const { return cache_->io(); }
  void reset_io() { cache_->reset_io(); }
  PageCache& cache() { return *cache_; }

 private:
  struct FreeRange {
    std::uint64_t first, count;
  };

  std::string path_;
  std::uint16_t k_;
  std::size_t record_bytes_;
  std::uint64_t per_page_;
  std::uint32_t page_size_;
  std::unique_ptr<PageFile> file_;
  std::unique_ptr<PageCache> cache_;
  std::uint64_t next_page_ = 0;
  std::vector<FreeRange> free_;
};

// Dimension with the largest sample variance over the run, single pass,
// ties to the lowest index. The measured variances are also returned.
std::size_t choose_split_dim(const ExternalRun& run, std::vector<double>* variances = nullptr);

// Records assigned to the left child: the nearest-to-median count that is a
// power-of-two multiple of leaf_capacity, so every leaf except possibly one
// ends up full.
std::uint64_t split_count(std::uint64_t n, std::size_t leaf_capacity);

// Pivot estimate for the target rank: the proportionally scaled order
// statistic of a uniform without-replacement sample along `dim`.
double sample_pivot(const ExternalRun& run, std::size_t dim, std::uint64_t target_rank,
                    std::size_t sample_size, Rng& rng);

// Exact order statistic of rank `target_rank` (1-based) along `dim`:
// sampled pivots + streaming three-way counting until the active run fits
// `memory_budget`, then in-memory selection. The input run is preserved.
double external_select(const ExternalRun& run, std::size_t dim, std::uint64_t target_rank,
                       const VamSplitParams& params, Rng& rng);

// Three-way split of `run` at `pivot` into runs of exactly
// (exact_left_count, n - exact_left_count) records; pivot-equal records are
// distributed by stream order to hit the count. The input run is released.
std::pair<ExternalRun, ExternalRun> partition_run(ExternalRun& run, std::size_t dim, double pivot,
                                                  std::uint64_t exact_left_count);

// Full bulk build over points (row-major, all the same arity). Writes the
// .rt file and returns the build log. Deterministic for a fixed seed.
BuildLog vamsplit_build(std::span<const std::vector<double>> points, const std::string& rtree_path,
                        const VamSplitParams& params, std::ostream* report = nullptr);

// Store wrapper: indexes the named numeric columns.
BuildLog vamsplit_build(const RecordStore& store, const std::vector<std::string>& key_columns,
                        const std::string& rtree_path, const VamSplitParams& params,
                        std::ostream* report = nullptr);

}  // namespace sky
