"""Energy-aware task consolidation: MCEETS and MaxUtil on a discrete-time VM pool."""
from .cluster import Cluster, UtilizationSummary, VmLedger, average_utilization, can_host, place, slot_utilization
from .energy import ComparisonReport, EnergyMetrics, PowerModel, compare, compute_metrics, vm_energy
from .schedulers import SchedulerConfig, fitness_batch, order_batch, select_vm_maxutil, select_vm_mceets
from .simkernel import ScheduleTrace, gantt, run
from .workload import Dataset, GenSpec, Task, UtilTriple, generate_dataset, read_dataset, validate_task, write_dataset

__version__ = "0.1.0"
