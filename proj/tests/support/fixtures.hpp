#pragma once

#include "flowscope/flow_matrix.hpp"
#include "flowscope/snapshot.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixture {

//! a -> {x:36, y:18, z:36}, b -> {y:10}.
flowscope::FlowMatrix two_layer_example();

//! Small product catalog:
//!   catalog
//!     electronics / cameras {camcorders, lenses, tripods, flash_memory}
//!                 / audio {headphones, speakers}
//!     apparel     / tops {knit_tops, shirts, tees, sweaters}
//!                 / bottoms {jeans, shorts}
//!     home        / decor {wall_decor, art_decor}
//!                 / hardware {home_hardware, tools}
//! with labels, a numeric `price`, a categorical `brand`, and three runs
//! M0..M2 over a shared evaluation set.
flowscope::SnapshotPtr catalog();

//! The same catalog as the JSONL inputs accepted by ingest.
struct CatalogFiles
{
  std::string taxonomy;
  std::string labels;
  std::string features;
  std::string evaluation;
  std::string sources;
};
CatalogFiles catalog_files();

//! Writes catalog_files() into `dir`; returns the ingest paths.
flowscope::IngestPaths write_catalog_files(const std::filesystem::path& dir);

//! Fresh, empty temporary directory unique to this process and `tag`.
std::filesystem::path temp_dir(const std::string& tag);

//! Random run over `categories` labels c0..c{k-1}, items i0..i{n-1}.
flowscope::ModelRun random_run(std::mt19937_64& rng,
                               const std::string& id,
                               long long ordinal,
                               std::size_t records,
                               std::size_t categories,
                               double accuracy);

} // namespace fixture

namespace fixture {

//! Run over the catalog leaves with three planted problems and sub-threshold
//! noise everywhere else:
//!   wall_decor <-> art_decor (20 / 15)               bidirectional confusion
//!   shirts, tees, sweaters, jeans -> knit_tops (6 each) broad category
//!   headphones -> jeans (8)                          crosses level-1 subtrees
flowscope::ModelRun injected_diagnostics_run();

} // namespace fixture
