import mlflow


def train(model, loader, criterion):
    hyper_params = {
        "epochs": 10,
        "num_classes": 10,
        "batch_size": 64,
        "learning_rate": 0.01,
        "optimizer": "sgd",
    }
    optimizer = build_optimizer(model, hyper_params["learning_rate"])
    for epoch in range(hyper_params["epochs"]):
        running_loss = 0.0
        for inputs, labels in loader:
            optimizer.zero_grad()
            loss = criterion(model(inputs), labels)
            loss.backward()
            optimizer.step()
            running_loss += loss.item()
        mlflow.log_metric("train_loss", running_loss, step=epoch)
