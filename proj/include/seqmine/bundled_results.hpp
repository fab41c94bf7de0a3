#pragma once

#include <string_view>

namespace seqmine {

// Verbatim copy of data/university_results.csv; tests keep the two in sync
// and pin its hash.
inline constexpr std::string_view bundled_results_csv = R"csv(# Year-wise university result pass percentages, subjects BE-101 .. BE-105.
#
# Source tables print one unlabeled table first, next to the caption
# "Result Graph for BE-102"; it is stored here as BE-102. The series starting
# at 62.5 is labeled BE-101 in its own caption and stored as such.
# BE-103 and BE-104 are printed with identical values and are kept that way.
year,subject_code,pass_pct
2003,BE-101,62.5
2004,BE-101,79.8
2005,BE-101,71.3
2006,BE-101,78.4
2007,BE-101,60.4
2003,BE-102,66.55
2004,BE-102,68.69
2005,BE-102,79.72
2006,BE-102,72.66
2007,BE-102,68.08
2003,BE-103,88.62
2004,BE-103,90.54
2005,BE-103,91.57
2006,BE-103,90.28
2007,BE-103,90.94
2003,BE-104,88.62
2004,BE-104,90.54
2005,BE-104,91.57
2006,BE-104,90.28
2007,BE-104,90.94
2003,BE-105,72.8
2004,BE-105,87.44
2005,BE-105,69.45
2006,BE-105,74.4
2007,BE-105,29.69
)csv";

} // namespace seqmine
