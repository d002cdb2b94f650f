# core/task_manager.py
import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor

from config import WORKERS
from core.errors import TaskError

logger = logging.getLogger(__name__)


class TaskManager:
    """Runs independent numerical tasks on a worker pool with ordered results."""

    def __init__(self, workers=None):
        self.workers = max(1, int(workers or WORKERS))
        self.tasks_queue = []

    def add_task(self, fn, *args, task_id=None):
        """Add a task to the queue."""
        task = {
            "fn": fn,
            "args": args,
            "id": task_id or f"task_{len(self.tasks_queue)}",
        }
        self.tasks_queue.append(task)
        logger.debug(f"Added task {task['id']}")
        return task["id"]

    async def execute_all_tasks(self):
        """Execute all queued tasks; results come back in queue order."""
        tasks, self.tasks_queue = self.tasks_queue, []
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            futures = [loop.run_in_executor(executor, self._execute_task, task) for task in tasks]
            outcomes = await asyncio.gather(*futures, return_exceptions=True)

        for index, (task, outcome) in enumerate(zip(tasks, outcomes)):
            if isinstance(outcome, BaseException):
                logger.error(f"Task {task['id']} failed: {str(outcome)}")
                raise TaskError(f"Task {task['id']} failed: {outcome}", task_id=task["id"], index=index, cause=outcome)
        return list(outcomes)

    @staticmethod
    def _execute_task(task):
        """Execute a single task."""
        logger.debug(f"Executing task {task['id']}")
        return task["fn"](*task["args"])

    def run_all(self):
        """Synchronous entry point for execute_all_tasks."""
        return asyncio.run(self.execute_all_tasks())
