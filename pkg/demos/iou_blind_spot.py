"""Two predictions with the same IoU can be very different from where the ego sits.

A car 8 m ahead and 1 m to the left gets two equally oversized boxes: one
grows toward the ego's path, the other away from it. IoU cannot tell them
apart. SDE can, because it measures the error along the lines through the
ego that matter for planning.
"""

import numpy as np

from egoeval import EgoPose, OrientedBox2, PointSet, box_iou_bev, sde

gt = OrientedBox2(8.0, 1.5, 4.0, 1.8, 0.0)
toward = OrientedBox2(8.0, 1.3, 4.0, 2.2, 0.0)
away = OrientedBox2(8.0, 1.7, 4.0, 2.2, 0.0)
boundary = PointSet(np.r_[gt.perimeter_samples(200), gt.corners()])
ego = EgoPose(0.0, 0.0, 0.0, 0.0)

print(f"{'prediction':<10} {'IoU':>6} {'SDE lat':>8} {'SDE lon':>8} {'SDE':>6}")
for name, box in (("toward", toward), ("away", away)):
    rec = sde(box.polygon(), boundary, ego)
    print(f"{name:<10} {box_iou_bev(box, gt):6.3f} {rec.sde_lat_signed:8.3f} {rec.sde_lon_signed:8.3f} {rec.sde:6.3f}")

print("\npositive lateral SDE means the prediction claims the car is closer to the ego's path than it is")
