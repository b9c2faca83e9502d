"""
Sliding-window planning for one audio clip
==========================================

Every recognizer in the pipeline scores short windows, not whole clips.
A plan tiles a clip into fixed-length cores and pads each core with
context on both sides; the core is what the window's label applies to.
"""

from paraqa import plan_windows

# A 10 second clip, 2 second cores, 1 second of context either side.
plan = plan_windows(10.0, t_s=2.0, delta_t_s=1.0, sample_id="talk-show-042")

print(f"sample {plan.sample_id}: {len(plan.windows)} windows")
print(f"{'core':>14}  {'window (core + context)':>24}")
for w in plan.windows:
    core = f"[{w.core_start_s:4.1f}, {w.core_end_s:4.1f}]"
    window = f"[{w.window_start_s:4.1f}, {w.window_end_s:4.1f}]"
    print(f"{core:>14}  {window:>24}")

# The last core absorbs any remainder instead of producing a sliver, so
# the cores always tile the clip exactly.
plan = plan_windows(7.3, t_s=2.0, delta_t_s=1.0)
print("\n7.3 s clip -> cores", [(w.core_start_s, w.core_end_s) for w in plan.windows])

# Gender changes more slowly than emotion, so its profile uses narrower
# context (0.5 s) on the same cores.
gender = plan_windows(10.0, t_s=2.0, delta_t_s=0.5)
print("\ngender windows:", [(w.window_start_s, w.window_end_s) for w in gender.windows])
