import logging

import torch
import wandb

logger = logging.getLogger(__name__)


def test(model, loader, criterion):
    model.eval()
    test_loss = 0.0
    correct = 0
    with torch.no_grad():
        for data, target in loader:
            output = model(data)
            test_loss += criterion(output, target).item()
            correct += (output.argmax(1) == target).sum().item()
    test_loss /= len(loader)
    accuracy = 100.0 * correct / len(loader.dataset)
    wandb.log({"test_loss": test_loss})
    logger.info("Test set: Average loss: %.4f, Accuracy: %.2f", test_loss, accuracy)
