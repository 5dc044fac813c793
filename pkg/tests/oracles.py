"""Independent reference implementations used only by the tests.

Each oracle is written the slow, obvious way and shares no code with the
package beyond plain data types.
"""

import math


def somersault_counter_literal(dive_frames, takeoff_frames, armstand):
    """Line-by-line half-somersault counter over math-frame (y up) poses.

    ``dive_frames`` is a list of ``(frame, pose)`` where pose is None or a
    dict with ``thorax`` and ``pelvis`` points.
    """
    half_som_count = 0
    curr_pose = None
    vertical_up_vector = [0, 1]
    vertical_down_vector = [0, -1]
    for frame, pose in dive_frames:
        curr_pose = pose
        if curr_pose is not None and frame not in takeoff_frames:
            thorax = curr_pose["thorax"]
            pelvis = curr_pose["pelvis"]
            vector1 = [thorax[0] - pelvis[0], thorax[1] - pelvis[1]]
            if (armstand and half_som_count % 2 == 1) or (not armstand and half_som_count % 2 == 0):
                vector2 = vertical_down_vector
                angle = get_angle_degrees(vector1, vector2)
            else:
                vector2 = vertical_up_vector
                angle = get_angle_degrees(vector1, vector2)
            if angle <= 75:
                half_som_count = half_som_count + 1
    return half_som_count


def get_angle_degrees(v1, v2):
    dot = v1[0] * v2[0] + v1[1] * v2[1]
    n = math.hypot(*v1) * math.hypot(*v2)
    return math.degrees(math.acos(max(-1.0, min(1.0, dot / n))))


def law_of_cosines_angle(a, b, c):
    """Interior angle at b from the three side lengths."""
    ab = math.dist(a, b)
    cb = math.dist(c, b)
    ac = math.dist(a, c)
    cos_b = (ab * ab + cb * cb - ac * ac) / (2 * ab * cb)
    return math.degrees(math.acos(max(-1.0, min(1.0, cos_b))))


def percentile_bruteforce(value, samples, polarity, band_center=None):
    """Count samples strictly worse than ``value`` plus half the ties, over n, times 100."""
    if polarity == "band_is_better":
        value = abs(value - band_center)
        samples = [abs(x - band_center) for x in samples]
        polarity = "lower_is_better"
    worse = ties = 0
    for x in samples:
        if x == value:
            ties += 1
        elif (x > value) if polarity == "lower_is_better" else (x < value):
            worse += 1
    return 100.0 * (worse + 0.5 * ties) / len(samples)


def mean_bruteforce(xs):
    total = 0.0
    for x in xs:
        total += x
    return total / len(xs)
