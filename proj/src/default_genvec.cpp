#include "qmc.hpp"

namespace mlqmc {

// Generated table: component-by-component construction for 8192 points in
// 400 dimensions (the `cbc` subcommand reproduces it).
const std::vector<std::uint64_t>& default_generating_vector() {
    static const std::vector<std::uint64_t> z = {
        3315, 3725, 23, 3829, 3143, 1483, 1699, 2263, 1459, 199,
        2361, 813, 2443, 4061, 1331, 2011, 167, 2563, 49, 3411,
        2819, 2529, 3813, 1021, 301, 3221, 1345, 11, 2205, 2743,
        3861, 1541, 223, 2721, 2501, 209, 515, 2891, 789, 3489,
        971, 3025, 139, 1705, 3931, 819, 2873, 3709, 2903, 3707,
        1031, 3827, 1985, 3015, 2881, 2795, 2125, 1457, 67, 3597,
        2001, 3519, 1969, 1427, 3241, 381, 3973, 1775, 1789, 3693,
        1277, 691, 613, 2027, 2045, 169, 239, 2239, 2643, 715,
        1691, 1107, 2705, 4029, 1509, 517, 25, 1341, 1999, 1983,
        3769, 2475, 3033, 3797, 687, 2689, 383, 495, 2803, 439,
        3091, 2731, 1731, 2921, 2807, 2385, 1445, 4071, 2787, 2601,
        463, 2383, 2679, 4063, 3635, 1927, 2477, 925, 2057, 1841,
        521, 75, 1241, 3855, 671, 45, 3141, 2785, 3903, 1333,
        2471, 1385, 1777, 3773, 2831, 1537, 3563, 1041, 1339, 151,
        3927, 2727, 1245, 1415, 409, 771, 1381, 2825, 281, 3739,
        973, 1149, 183, 4075, 621, 2195, 2683, 3279, 2485, 919,
        1637, 3477, 3271, 3047, 2503, 3137, 2197, 975, 2921, 369,
        505, 3665, 739, 3391, 3515, 3091, 335, 2015, 3727, 1475,
        2087, 2477, 2785, 1285, 4071, 463, 671, 1445, 45, 1241,
        3121, 1467, 1841, 201, 1747, 3033, 3773, 925, 383, 2057,
        2471, 1537, 2679, 3579, 1041, 2787, 687, 151, 1777, 2831,
        1245, 313, 4063, 409, 1339, 1983, 3141, 439, 2825, 2385,
        2883, 1381, 3739, 3927, 1415, 1671, 771, 3941, 2727, 183,
        2475, 2731, 281, 973, 1999, 1971, 1375, 1333, 1385, 1341,
        621, 7, 3563, 3279, 517, 2683, 2601, 919, 3769, 1509,
        521, 75, 3635, 4075, 1691, 1731, 1927, 2485, 2195, 2793,
        495, 3477, 2715, 3855, 1637, 3167, 3047, 1553, 2807, 2197,
        2477, 2689, 2785, 1149, 2679, 657, 2921, 2087, 3271, 3033,
        687, 1467, 3773, 2825, 201, 2471, 2503, 2787, 4071, 671,
        1285, 1983, 1445, 1747, 2831, 463, 2803, 383, 3515, 3903,
        3579, 151, 925, 45, 3727, 2027, 1841, 1475, 2383, 4063,
        1777, 2385, 1671, 2255, 3391, 1027, 1987, 1381, 1339, 369,
        3735, 3797, 2731, 3121, 2057, 3091, 2015, 3925, 3279, 3665,
        771, 1537, 183, 973, 7, 1245, 439, 1241, 1375, 919,
        739, 335, 281, 2239, 3941, 2051, 3739, 1041, 505, 2475,
        2883, 517, 1385, 1277, 3113, 715, 2727, 1999, 1415, 2641,
        3197, 1341, 621, 1971, 313, 227, 1509, 3141, 239, 2683,
        2601, 2147, 2705, 1333, 521, 3635, 975, 409, 3927, 1691,
        2477, 3477, 1637, 3047, 4075, 3645, 463, 671, 3769, 2297,
        2087, 3033, 2485, 3137, 1467, 1027, 2825, 4071, 1983, 383,
    };
    return z;
}

} // namespace mlqmc
