#include "sky/error.hpp"

namespace sky {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::missing_column: return "MissingColumn";
    case Errc::type_mismatch: return "TypeMismatch";
    case Errc::unit_mismatch: return "UnitMismatch";
    case Errc::position_out_of_range: return "PositionOutOfRange";
    case Errc::page_overflow: return "PageOverflow";
    case Errc::corrupt_header: return "CorruptHeader";
    case Errc::unknown_level: return "UnknownLevel";
    case Errc::unknown_dimension: return "UnknownDimension";
    case Errc::non_numeric_measure: return "NonNumericMeasure";
    case Errc::empty_group: return "EmptyGroup";
    case Errc::level_too_deep: return "LevelTooDeep";
    case Errc::bad_radius: return "BadRadius";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::bad_window: return "BadWindow";
    case Errc::empty_tree: return "EmptyTree";
    case Errc::empty_input: return "EmptyInput";
    case Errc::empty_run: return "EmptyRun";
    case Errc::no_split_needed: return "NoSplitNeeded";
    case Errc::rank_out_of_range: return "RankOutOfRange";
    case Errc::count_infeasible: return "CountInfeasible";
    case Errc::too_few_subclusters: return "TooFewSubclusters";
    case Errc::sample_too_large: return "SampleTooLarge";
    case Errc::bad_params: return "BadParams";
    case Errc::infeasible_c: return "InfeasibleC";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::bad_config: return "BadConfig";
    case Errc::io_error: return "IoError";
  }
  return "Error";
}

}  // namespace sky
